//! Hand-written programs used as designed opponents.

use alloc::vec;
use alloc::vec::Vec;

use super::{Instruction::*, Program};

/// Diverges on every input.
pub fn never() -> Program {
    Program::new(vec![Jmp(0)])
}

/// Total, one step, always `v`.
pub fn constant(v: u64) -> Program {
    Program::new(vec![Out(v)])
}

/// Halts immediately with its input, so `W_{e,s} = [0, s)`.
pub fn identity() -> Program {
    Program::new(vec![])
}

/// Total; 1 on even inputs, 0 on odd ones.
pub fn parity() -> Program {
    Program::new(vec![Djz(0, 3), Djz(0, 4), Jmp(0), Out(1), Out(0)])
}

/// Halts (with 0) exactly on even inputs.
pub fn evens_domain() -> Program {
    Program::new(vec![Djz(0, 3), Djz(0, 4), Jmp(0), Out(0), Jmp(4)])
}

/// Halts (with 0) exactly on inputs `> threshold`, after `threshold + 2` steps.
pub fn above(threshold: u64) -> Program {
    let t = threshold as usize;
    let trap = (t + 2) as u64;
    let mut ins: Vec<_> = (0..=t).map(|_| Djz(0, trap)).collect();
    ins.push(Out(0));
    ins.push(Jmp(trap));
    Program::new(ins)
}

/// Total; halts with 0 after about `x` steps.
pub fn countdown() -> Program {
    Program::new(vec![Djz(0, 2), Jmp(0)])
}

/// Relative to an oracle `A`: `A(x)`.
pub fn oracle_identity() -> Program {
    Program::new(vec![Qry(0)])
}

/// Relative to an oracle `A`: `1 − A(x)`.
pub fn oracle_complement() -> Program {
    Program::new(vec![Qry(0), Djz(0, 3), Out(0), Out(1)])
}

/// Relative to an oracle `A`: membership of `x` in `𝓡(A)`. Computes the
/// 2-adic valuation of `x` by repeated halving, then asks the oracle about it.
pub fn r_membership() -> Program {
    Program::new(vec![
        Djz(0, 14), // 0: x = 0 is in no slice
        Inc(0),     // 1: undo the test decrement
        Djz(0, 6),  // 2: halving loop; r0 exhausted on an even step
        Djz(0, 11), // 3: exhausted on an odd step
        Inc(2),     // 4: r2 counts pairs
        Jmp(2),     // 5
        Djz(2, 9),  // 6: even: r0 := r2
        Inc(0),     // 7
        Jmp(6),     // 8
        Inc(1),     // 9: valuation += 1
        Jmp(2),     // 10
        Qry(1),     // 11: odd: ask the oracle about the valuation
        Djz(1, 14), // 12
        Out(1),     // 13
        Out(0),     // 14
    ])
}
