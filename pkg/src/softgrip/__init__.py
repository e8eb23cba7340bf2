"""Variable-stiffness tendon-driven soft gripper: mechanics, stability, grasp policy and agent workflow."""

__version__ = "0.1.0"
