# services/__init__.py
"""Services package initialization"""

from .counterexample import counterexample_report
from .exact_checker import ExactChecker, check_reduction_exact
from .lemma_checker import LemmaChecker, check_lemma2
from .statistical_checker import StatisticalChecker, check_reduction_statistical

__all__ = [
    'ExactChecker',
    'LemmaChecker',
    'StatisticalChecker',
    'check_reduction_exact',
    'check_reduction_statistical',
    'check_lemma2',
    'counterexample_report'
]
