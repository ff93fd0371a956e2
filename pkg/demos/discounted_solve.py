"""One discounted solve, and what the a priori estimates say about it."""
import numpy as np

from ergodic_hjb import (discretize_kernel, instantiate_model, lipschitz_x, make_grid,
                         solve_discounted)
from ergodic_hjb.kernel import theta_values
from ergodic_hjb.sweep import coupling_constants

grid = make_grid(256, 32)
model = instantiate_model("quad-eikonal", grid, g="continuous")
kernel = discretize_kernel("affine-eta", grid)

for alpha in (1.0, 0.1, 0.01):
    v, rep = solve_discounted(model, kernel, alpha)
    M1, M2 = coupling_constants(model, kernel)
    lip = lipschitz_x(v)
    theta = np.abs(theta_values(kernel, v.values)).max()
    print(f"alpha={alpha:5.2f}  newton steps={rep.iterations:2d}  residual={rep.final_residual:.1e}")
    print(f"    alpha*sup v = {alpha * rep.sup_v:.4f} <= sup f = {model.sup_f:.4f}")
    print(f"    min v = {rep.inf_v:.1e}  (nonnegative up to rounding)")
    print(f"    Lip_x = {lip:.4f} <= {model.slope_bound + 1:.4f};  "
          f"sup|Theta v| = {theta:.4f} <= {M1 + M2 * lip:.4f}")
