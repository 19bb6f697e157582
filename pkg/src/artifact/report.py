"""Check results shared by all validators."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: object = None
    note: str = ""

    def as_dict(self, trace=False):
        out = {"name": self.name, "status": "pass" if self.passed else "fail"}
        if self.note:
            out["note"] = self.note
        if trace and self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)

    def add(self, name, passed, witness=None, note=""):
        self.checks.append(Check(name, bool(passed), witness, note))
        return passed

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.witness, c.note))

    def check_all(self, name, items, predicate, note=""):
        """Record one check that passes iff ``predicate`` holds on every item.

        The first failing item becomes the witness.
        """
        for item in items:
            if not predicate(item):
                return self.add(name, False, item, note)
        return self.add(name, True, None, note)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def as_dict(self, trace=False):
        return {
            "title": self.title,
            "ok": self.ok,
            "checks": [c.as_dict(trace) for c in self.checks],
        }

    def __str__(self):
        lines = [self.title]
        for c in self.checks:
            mark = "pass" if c.passed else "FAIL"
            extra = f"  witness={c.witness!r}" if not c.passed else ""
            lines.append(f"  [{mark}] {c.name}{extra}")
        return "\n".join(lines)
