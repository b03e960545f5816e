"""Door-detection research pipeline toolkit.

Geometry: occupancy maps from meshes, navigation graphs, perception
poses. Evaluation: IoU, operational performance indicators, enriched
average precision, confidence sweeps. Downstream: door-status topology
inference. Workflow: a bounding-box annotation service with
carry-forward.
"""

from .annotation import AnnotationSession, open_session
from .contours import Contour, find_contours
from .datafile import DatasetFile, ImageInfo, load_dataset, save_dataset
from .grid import CellState, GridMap
from .mapio import load_map, save_map
from .meshing import TriangleMesh, load_obj, slice_mesh_to_map
from .metrics import (ApReport, Box, Detection, DoorStatus, GroundTruthBox,
                      OpiConfig, OpiReport, average_precision,
                      confidence_sweep, iou, map_score, opi_aggregate,
                      opi_image)
from .morphology import morph_cleanup
from .navgraph import NavGraph, build_nav_graph
from .poses import (PerceptionPose, PoseConfig, csv_to_poses, extract_poses,
                    poses_to_csv)
from .semantic import SemanticFrame, door_pixel_fraction, propose_boxes
from .skeleton import skeletonize
from .topology import (DoorRecord, DoorVerdict, Observation, TopologyGraph,
                       VerdictOutcome, associate, build_topology,
                       compare_topologies, majority_vote,
                       recognition_accuracy)
from .voronoi import VoronoiLabeling, voronoi_boundary

__version__ = "0.1.0"
