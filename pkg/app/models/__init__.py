# -*- coding: utf-8 -*-
"""Models module."""
from app.models.cartan import CartanCore, CartanRealization, extend, from_preset, validate_core
from app.models.group_point import GaussParts, GroupPoint
from app.models.ratfunc import RatFunc
from app.models.report import CheckReport
from app.models.seed import DoubleWord, EnsembleMatrices, Seed, build_ensemble, build_seed
from app.models.weyl import WeylElement

__all__ = [
    "CartanCore",
    "CartanRealization",
    "extend",
    "from_preset",
    "validate_core",
    "GaussParts",
    "GroupPoint",
    "RatFunc",
    "CheckReport",
    "DoubleWord",
    "EnsembleMatrices",
    "Seed",
    "build_ensemble",
    "build_seed",
    "WeylElement",
]
