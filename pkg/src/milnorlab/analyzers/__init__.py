"""Verdict-producing procedures built on the determinantal ideals and numerics."""
from .common import AnalysisConfig
from .composition import CompositionReport, chain_rule_holds, composition_analysis
from .fibres import FiberReport, NoSolutionsFound, ProductReport, fiber_report, product_structure_check
from .image import ImageGermReport, default_directions, find_preimage, image_germ_stability, image_membership
from .inclusion import InclusionCheck, ISVResult, isolated_singular_value_check, milnor_zero_fiber_check
from .tameness import (
    NOT_TAME,
    TAME_UP_TO_RESOLUTION,
    TRIVIALLY_TAME,
    StageReport,
    TamenessVerdict,
    WitnessPoint,
    radius_schedule,
    tameness_scan,
)
