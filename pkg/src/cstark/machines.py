"""Counter machines: the small computability substrate behind W_{e,s}.

Instructions (0-based program addresses):

    inc r        r += 1, go to the next instruction
    dec r L      if r == 0 go to L, else r -= 1 and go to the next instruction
    jmp L        go to L
    halt         stop (the machine accepts its input)

The input is placed in register 0; every executed instruction, including
``halt``, costs one step.  Running past the last instruction also halts.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError

_INSTR = re.compile(r"^(inc|dec|jmp|halt)\b(.*)$")


@dataclass(frozen=True)
class Instruction:
    op: str
    reg: int = 0
    target: int = 0

    def __str__(self):
        if self.op == "inc":
            return f"inc {self.reg}"
        if self.op == "dec":
            return f"dec {self.reg} {self.target}"
        if self.op == "jmp":
            return f"jmp {self.target}"
        return "halt"


@dataclass(frozen=True)
class CounterMachine:
    program: tuple

    @classmethod
    def parse(cls, text: str, line: int = 1, column: int = 1) -> "CounterMachine":
        """Parse ``instr; instr; ...``; errors carry the column of the bad instruction."""
        instrs = []
        pos = 0
        for chunk in text.split(";"):
            col = column + pos + (len(chunk) - len(chunk.lstrip()))
            pos += len(chunk) + 1
            body = chunk.strip()
            if not body:
                continue
            m = _INSTR.match(body)
            if not m:
                raise ParseError(f"unknown instruction {body.split()[0]!r}", line, col, text)
            op, rest = m.group(1), m.group(2).split()
            want = {"inc": 1, "dec": 2, "jmp": 1, "halt": 0}[op]
            if len(rest) != want or not all(a.isdigit() for a in rest):
                raise ParseError(f"'{op}' expects {want} nonnegative integer argument(s)", line, col, text)
            args = [int(a) for a in rest]
            if op == "inc":
                instrs.append(Instruction("inc", args[0]))
            elif op == "dec":
                instrs.append(Instruction("dec", args[0], args[1]))
            elif op == "jmp":
                instrs.append(Instruction("jmp", 0, args[0]))
            else:
                instrs.append(Instruction("halt"))
        if not instrs:
            raise ParseError("empty program", line, column, text)
        return cls(tuple(instrs))

    def __str__(self):
        return "; ".join(str(i) for i in self.program)

    def start(self, x: int) -> "MachineRun":
        return MachineRun(self, x)

    def halting_time(self, x: int, budget: int) -> int | None:
        """Steps needed to halt on input x, or None if more than ``budget``."""
        run = self.start(x)
        run.advance(budget)
        return run.steps if run.halted else None


@dataclass
class MachineRun:
    """A resumable simulation on one input."""

    machine: CounterMachine
    x: int
    pc: int = 0
    steps: int = 0
    halted: bool = False
    regs: dict = field(default_factory=dict)

    def __post_init__(self):
        self.regs = {0: self.x}

    def advance(self, budget: int) -> None:
        """Run until halting or until ``budget`` total steps have been used."""
        prog = self.machine.program
        regs = self.regs
        while not self.halted and self.steps < budget:
            if self.pc >= len(prog):
                self.halted = True
                break
            ins = prog[self.pc]
            self.steps += 1
            if ins.op == "inc":
                regs[ins.reg] = regs.get(ins.reg, 0) + 1
                self.pc += 1
            elif ins.op == "dec":
                v = regs.get(ins.reg, 0)
                if v == 0:
                    self.pc = ins.target
                else:
                    regs[ins.reg] = v - 1
                    self.pc += 1
            elif ins.op == "jmp":
                self.pc = ins.target
            else:
                self.halted = True
        if not self.halted and self.pc >= len(prog):
            self.halted = True


class EnumerationCursor:
    """Stagewise W_{e,s} = {x < s : the machine halts on x within s steps}.

    Single-owner: simulations are resumed, never restarted.
    """

    def __init__(self, machine: CounterMachine):
        self.machine = machine
        self._runs: list[MachineRun] = []
        self._counts: dict[int, int] = {}

    def count(self, s: int) -> int:
        """#W_{e,s}."""
        hit = self._counts.get(s)
        if hit is not None:
            return hit
        while len(self._runs) < s:
            self._runs.append(self.machine.start(len(self._runs)))
        total = 0
        for run in self._runs[:s]:
            if not run.halted:
                run.advance(s)
            if run.halted and run.steps <= s:
                total += 1
        self._counts[s] = total
        return total

    def members(self, s: int) -> list[int]:
        self.count(s)
        return [r.x for r in self._runs[:s] if r.halted and r.steps <= s]


# shipped machines
NEVER = CounterMachine.parse("jmp 0")
ALWAYS = CounterMachine.parse("halt")
EVENS = CounterMachine.parse("dec 0 3; dec 0 4; jmp 0; halt; jmp 4")
BELOW_THREE = CounterMachine.parse("dec 0 4; dec 0 4; dec 0 4; jmp 3; halt")

SHIPPED = {"never": NEVER, "always": ALWAYS, "evens": EVENS, "below3": BELOW_THREE}
