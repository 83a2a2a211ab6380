"""Rate regions of the cognitive interference channel with transmitter-side state.

Subpackages and modules:

* ``gaussian_regions`` -- closed-form Gaussian bounds, frontier sweeps, certification
* ``gauss_oracle``     -- covariance-model ground truth for the Gaussian formulas
* ``dmc_regions``      -- discrete memoryless bounds on explicit probability tensors
* ``fm_polytope``      -- exact Fourier-Motzkin elimination over symbolic constants
* ``gp_simulator``     -- Monte-Carlo run of the layered binning scheme
* ``cli``              -- command-line front end
"""

__version__ = "0.1.0"
