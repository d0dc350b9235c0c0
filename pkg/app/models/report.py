"""
CheckReport - 検証結果 1 件分

JSON 行 {"check", "instance", "pass", "witness"} として出力する。キーは
常にソートし、有理数は [分子, 分母] で表すので、同じ入力と乱数シード
からはバイト単位で同じ出力になる。
"""

import json
from dataclasses import dataclass, field
from typing import Any, Dict


@dataclass
class CheckReport:
    """検証結果"""

    check: str
    instance: Dict[str, Any]
    passed: bool
    witness: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def vacuous(cls, check: str, instance: Dict[str, Any], reason: str) -> "CheckReport":
        return cls(check, instance, True, {"vacuous": True, "reason": reason})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.check,
            "instance": self.instance,
            "pass": self.passed,
            "witness": self.witness,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
