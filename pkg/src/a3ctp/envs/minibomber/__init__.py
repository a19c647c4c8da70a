from .board import BomberBoard, classify_outcome, generate_board, board_to_text, board_from_text
from .env import MiniBomber
from .obs import encode_observation, obs_dim
from .opponents import rulebased_opponent, static_opponent
