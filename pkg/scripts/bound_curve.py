#!/usr/bin/env python3
"""Print the estimation error bound as n grows, for the logistic loss."""

import argparse

import numpy as np

from pconf.loss import LossKind, loss_constants
from pconf.theory import BoundInputs, estimation_error_bound, rademacher_linear

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--c-w", type=float, default=1.0)
ap.add_argument("--c-phi", type=float, default=1.0)
ap.add_argument("--c-r", type=float, default=0.1)
ap.add_argument("--pi-plus", type=float, default=0.5)
args = ap.parse_args()

c_ell, l_ell = loss_constants(LossKind.LOGISTIC, args.c_w * args.c_phi)
print(f"{'n':>9} {'bound':>12}")
for n in np.logspace(2, 6, 9).astype(int):
    rad = rademacher_linear(args.c_w, args.c_phi, int(n))
    b = BoundInputs(int(n), args.pi_plus, args.c_r, c_ell, l_ell, rad)
    print(f"{n:>9} {estimation_error_bound(b):>12.5g}")
