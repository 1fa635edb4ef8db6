"""steerlab: an executable laboratory for quantum ensemble steering.

The package has three layers:

* :mod:`steerlab.linalg` / :mod:`steerlab.states` — deterministic complex
  linear algebra and the state/ensemble/observable vocabulary,
* :mod:`steerlab.ghjw` — the constructive purification engine: every ensemble
  averaging to the same density matrix is reachable from one purification by
  a unitary on the distant side alone, and that unitary is computed, not just
  proved to exist,
* :mod:`steerlab.protocols` — Monte Carlo simulations of two remote-steering
  protocols built on that engine, with numba-compiled kernels and a pure
  numpy fallback (see :mod:`steerlab.backend`).
"""

__version__ = "0.1.0"
