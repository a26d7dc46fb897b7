from .config import ConfigError, LabConfig
from .experiments import rkt_probe, run_experiment, selftest, theorem1_report, theoremA_report
from .report import LabReport
from .symbols import build_symbol, symbol_suite
