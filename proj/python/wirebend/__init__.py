"""Wireframe to bent-wire fabrication toolkit."""

from ._core import (
    DomainError,
    Graph,
    Instruction,
    InstructionKind,
    InvalidInput,
    LimitError,
    MachineError,
    ParseError,
    Program,
    WirebendError,
    apply_corrections,
    check,
    check_program,
    combined_commanded,
    compile,
    compile_points,
    default_profile,
    estimate,
    euler_path,
    euler_status,
    run_emulated,
    setback_commanded,
    simulate,
    springback_target,
    to_steps,
    torque,
)

__all__ = [name for name in dir() if not name.startswith("_")]
