"""cubelab: a deterministic Rubik's Cube POMDP benchmark environment.

Subsystems: sticker/cubie mechanics (cube, cubies), facelet codecs (codecs),
progress metrics (metrics), two-phase and provably optimal solvers (twophase,
optimal), exact-depth task generation (tasks), tiered observations (observe),
live episodes and the session service (session, service), and the REINFORCE
baseline (rl).
"""

from .cube import (FACES, MOVES, SOLVED, CubeError, CubeState, Move, apply_move,
                   format_moves, invert_seq, inverse, is_solved, parse_moves, scramble)
from .cubies import CubieState, decompose_cubies
from .codecs import (decode_initial, encode_initial, from_solver_format,
                     to_solver_format, validate_solver)
from .metrics import (MetricKind, StageReport, dense_reward, phi_face, phi_heuristic,
                      phi_sticker, terminal_reward)
from .observe import RenderedImage, Tier, Viewpoint, observe, parse_rendered
from .session import (EpisodeRecord, MetricReport, Session, SessionConfig,
                      SessionStatus, SolverTool, compute_metrics, replay)
from .tasks import SplitConfig, TaskGenerator, TestCase, load_manifest, write_manifest

__version__ = "0.1.0"
