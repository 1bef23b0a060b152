from .dsl import RewriteRule, RuleScript, RuleSyntaxError, parse_rules
from .engine import MatchBinding, RewriteCapWarning, RuleEvaluationError, eval_block, find_match, optimize

__all__ = [
    "MatchBinding",
    "RewriteCapWarning",
    "RewriteRule",
    "RuleEvaluationError",
    "RuleScript",
    "RuleSyntaxError",
    "eval_block",
    "find_match",
    "optimize",
    "parse_rules",
]
