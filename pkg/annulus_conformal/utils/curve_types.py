from enum import Enum


class CurveKind(Enum):
    OUTER = "outer"
    HOLE = "hole"
    HOLE_CIRCLE_REF = "hole_circle_ref"


class OutputFormat(Enum):
    CSV = "csv"
    SVG = "svg"
    JSON = "json"


class ShapeKind(Enum):
    HYPOTROCHOID = "hypotrochoid"
    POLYGON = "polygon"


class GapReference(Enum):
    # d measured from the curve point Re F(1)
    CURVE = "curve"
    # d measured from the normalization value (--C, --rout or --a)
    NORM = "norm"
