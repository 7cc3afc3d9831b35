"""Estimation limits and estimators for channel estimation behind a 1-bit ADC.

The package covers the full chain for a real-valued pilot-based link whose
receiver quantizes to one bit against an unknown comparator offset: Fisher
information and CRLBs (offset known and unknown, deterministic and
random-gain setups), the induced quantization-loss ratios, the matching
maximum-likelihood and posterior estimators, and a reproducible Monte Carlo
harness that verifies the bounds and regenerates the loss tables.
"""

from __future__ import annotations

import subprocess
from pathlib import Path

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    FisherMatrix,
    HybridBounds,
    HybridPrior,
    LossReport,
    QuadratureSpec,
    SystemPoint,
    crlb_1bit_known,
    crlb_1bit_unknown,
    fisher_1bit,
    fisher_ideal,
    hybrid_bounds,
    loss_deterministic,
    loss_hybrid,
    psi_h,
)
from .errors import (  # noqa: E402
    ConvergenceError,
    ExperimentError,
    QuadratureError,
    SingularFisherError,
)
from .estimators import (  # noqa: E402
    JointEstimate,
    SolverOptions,
    ideal_map,
    ideal_mle,
    onebit_jmapmle,
    onebit_jmle,
    onebit_mle_known_alpha,
)
from .kernels import PhiPair, log_phi, phi_pair, qfunc, qfunc_inv  # noqa: E402
from .montecarlo import ExperimentConfig, McResult, run_monte_carlo  # noqa: E402
from .signal_model import (  # noqa: E402
    BinaryObservation,
    CountStatistic,
    IdealObservation,
    PilotSequence,
    count_stats,
    make_pilot,
    quantize,
    synth_ideal,
)
from .sweep import SweepTable, format_table, read_table, sweep_loss, write_table  # noqa: E402

__all__ = [
    "__version__",
    "version_string",
    "PhiPair", "qfunc", "qfunc_inv", "log_phi", "phi_pair",
    "PilotSequence", "IdealObservation", "BinaryObservation", "CountStatistic",
    "make_pilot", "synth_ideal", "quantize", "count_stats",
    "SystemPoint", "FisherMatrix", "LossReport", "HybridPrior", "HybridBounds",
    "QuadratureSpec", "fisher_ideal", "fisher_1bit", "crlb_1bit_unknown",
    "crlb_1bit_known", "loss_deterministic", "psi_h", "hybrid_bounds", "loss_hybrid",
    "SolverOptions", "JointEstimate", "ideal_mle", "ideal_map",
    "onebit_jmle", "onebit_jmapmle", "onebit_mle_known_alpha",
    "ExperimentConfig", "McResult", "run_monte_carlo",
    "SweepTable", "sweep_loss", "write_table", "read_table", "format_table",
    "SingularFisherError", "QuadratureError", "ConvergenceError", "ExperimentError",
]


def version_string() -> str:
    """Version for experiment outputs: git describe when available, else the release."""
    try:
        out = subprocess.run(
            ["git", "describe", "--tags", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"v{__version__}"
