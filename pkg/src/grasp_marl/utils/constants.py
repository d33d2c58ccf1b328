"""
Constants

Application-wide constants and configuration defaults.
"""

from pathlib import Path

# Application Information
APP_NAME = "GRASP-MARL"
APP_VERSION = "0.1.0"

# Training modes
MODE_GRASP = "grasp"
MODE_BASELINE = "mappo_baseline"
MODE_ALIGNED = "grasp_aligned"
TRAIN_MODES = [MODE_GRASP, MODE_BASELINE, MODE_ALIGNED]

# Environment presets
ENV_MATRIX_CLIMB = "matrix_climb"
ENV_MATRIX_COORDINATION = "matrix_coordination"
ENV_MATRIX_CUSTOM = "matrix_custom"
ENV_GRID_SPREAD = "grid_spread"
ENV_TEAM_QUADRATIC = "team_quadratic"
MATRIX_ENVS = [ENV_MATRIX_CLIMB, ENV_MATRIX_COORDINATION, ENV_MATRIX_CUSTOM]
ENV_PRESETS = MATRIX_ENVS + [ENV_GRID_SPREAD, ENV_TEAM_QUADRATIC]

# Policy / critic families
POLICY_TABULAR = "tabular"
POLICY_MLP = "mlp"
POLICY_FAMILIES = [POLICY_TABULAR, POLICY_MLP]
CRITIC_FAMILIES = [POLICY_TABULAR, POLICY_MLP]

# Optimizers and consensus solvers
OPTIMIZER_PLAIN = "plain"
OPTIMIZER_ADAM = "adam"
OPTIMIZERS = [OPTIMIZER_PLAIN, OPTIMIZER_ADAM]
SOLVER_PGD = "pgd"
SOLVER_FRANK_WOLFE = "frank_wolfe"
CONSENSUS_SOLVERS = [SOLVER_PGD, SOLVER_FRANK_WOLFE]

# Metrics formats
METRICS_CSV = "csv"
METRICS_JSONL = "jsonl"
METRICS_FORMATS = [METRICS_CSV, METRICS_JSONL]

# Hyperparameter defaults
DEFAULT_LEARNING_RATE = 5e-4
DEFAULT_CRITIC_LEARNING_RATE = 5e-4
DEFAULT_GAMMA = 0.99
DEFAULT_GAE_LAMBDA = 0.95
DEFAULT_CLIP_EPSILON = 0.2
DEFAULT_CRITIC_CLIP_EPSILON = 0.2
DEFAULT_PPO_EPOCHS = 5
DEFAULT_MINIBATCHES = 1
DEFAULT_EPISODES_PER_ITERATION = 64
DEFAULT_ITERATIONS = 200
DEFAULT_CONSENSUS_TOL = 1e-8
DEFAULT_CONSENSUS_MAX_ITER = 10_000
DEFAULT_CONSENSUS_COEFFICIENT = 1.0
DEFAULT_EQUILIBRIUM_TOL = 1e-4
DEFAULT_HIDDEN_WIDTH = 16
DEFAULT_CRITIC_HIDDEN_WIDTH = 64
DEFAULT_INIT_SCALE = 0.1

# Adam
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# Environment defaults
CLIMB_PAYOFF = [[11.0, -30.0, 0.0], [-30.0, 7.0, 6.0], [0.0, 0.0, 5.0]]
CLIMB_PAYOFF_SCALE = 0.1
COORDINATION_PAYOFF = [[1.0, 0.0], [0.0, 0.5]]
DEFAULT_MATRIX_EPISODE_LENGTH = 1
GRID_SPREAD_AGENTS = 3
GRID_SPREAD_WIDTH = 5
GRID_SPREAD_EPISODE_LENGTH = 25
GRID_SPREAD_COLLISION_PENALTY = 1.0
TEAM_QUADRATIC_AGENTS = 3
TEAM_QUADRATIC_DIM_PER_AGENT = 4
TEAM_QUADRATIC_RIDGE = 0.1
TEAM_QUADRATIC_LEARNING_RATE = 0.15
TEAM_QUADRATIC_ITERATIONS = 2000
MAX_TABULAR_OBSERVATIONS = 4096

# Numerical tolerances
KKT_EPS = 1e-6
POWER_ITERATIONS = 50

# Random stream ids
STREAM_INIT = 1
STREAM_ENV = 2
STREAM_ACT = 3
STREAM_MINIBATCH = 4
STREAM_VERIFY = 5
STREAM_PROBLEM = 6

# Checkpoint format
CHECKPOINT_MAGIC = b"GRASPMARLCKPT\x00\x00\x00"
CHECKPOINT_VERSION = 1

# Output files
METRICS_FILE_STEM = "metrics"
EFFECTIVE_CONFIG_FILE = "config.json"
RUN_LOG_FILE = "run.log"
CHECKPOINT_DIR = "checkpoints"
ABLATION_FILE = "ablation.csv"

# Exit codes
EXIT_OK = 0
EXIT_RUNTIME_FAILURE = 1
EXIT_USAGE_FAILURE = 2

# Verification suites
VERIFY_SUITES = ["qp", "kkt", "gamma_factor", "gradcheck", "gae", "margin", "critic"]

# Logging Configuration
DEFAULT_LOG_DIR = Path.cwd() / "runs" / "logs"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"
MAX_LOG_FILE_SIZE = 10 * 1024 * 1024  # 10MB
LOG_BACKUP_COUNT = 5
DEFAULT_FILE_LOGGING = False  # File logging disabled by default
