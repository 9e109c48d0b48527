use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::eop::pairing;

/// One register machine instruction. Register 0 holds the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    /// `r += 1`
    Inc(u64),
    /// If `r == 0` jump to the target, otherwise `r -= 1` and fall through.
    Djz(u64, u64),
    Jmp(u64),
    /// Halt with a literal output.
    Out(u64),
    /// `r := oracle(r)`, 0 or 1.
    Qry(u64),
}

const KINDS: u64 = 5;

impl Instruction {
    /// Bijection between instructions and naturals.
    pub fn code(self) -> Option<u64> {
        let (kind, payload) = match self {
            Instruction::Inc(r) => (0, r),
            Instruction::Djz(r, t) => (1, pairing::pair(r, t)?),
            Instruction::Jmp(t) => (2, t),
            Instruction::Out(v) => (3, v),
            Instruction::Qry(r) => (4, r),
        };
        payload.checked_mul(KINDS)?.checked_add(kind)
    }

    pub fn from_code(c: u64) -> Instruction {
        let payload = c / KINDS;
        match c % KINDS {
            0 => Instruction::Inc(payload),
            1 => {
                let (r, t) = pairing::unpair(payload);
                Instruction::Djz(r, t)
            }
            2 => Instruction::Jmp(payload),
            3 => Instruction::Out(payload),
            _ => Instruction::Qry(payload),
        }
    }

    fn register(self) -> Option<u64> {
        match self {
            Instruction::Inc(r) | Instruction::Djz(r, _) | Instruction::Qry(r) => Some(r),
            Instruction::Jmp(_) | Instruction::Out(_) => None,
        }
    }
}

/// A register machine program.
///
/// Control leaving the program (falling past the last instruction, or a jump
/// to any target `≥ len`) halts with the current value of register 0 as the
/// output. Every instruction list is therefore a runnable program, which is
/// what makes the numbering total.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Program {
    instructions: Vec<Instruction>,
}

impl Program {
    pub fn new(instructions: Vec<Instruction>) -> Self {
        Program { instructions }
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Number of distinct registers the program touches, input register included.
    pub fn register_count(&self) -> usize {
        let mut regs: Vec<u64> = self.instructions.iter().filter_map(|i| i.register()).collect();
        regs.push(0);
        regs.sort_unstable();
        regs.dedup();
        regs.len()
    }

    pub fn uses_oracle(&self) -> bool {
        self.instructions.iter().any(|i| matches!(i, Instruction::Qry(_)))
    }

    /// Canonical index: `[] ↦ 0`, `i :: rest ↦ 1 + ⟨code(i), index(rest)⟩`.
    /// `None` when the index does not fit in a `u64`.
    pub fn encode(&self) -> Option<u64> {
        let mut acc: u64 = 0;
        for ins in self.instructions.iter().rev() {
            acc = pairing::pair(ins.code()?, acc)?.checked_add(1)?;
        }
        Some(acc)
    }

    /// Total inverse of [`Program::encode`].
    pub fn decode(mut index: u64) -> Program {
        let mut instructions = Vec::new();
        while index > 0 {
            let (head, rest) = pairing::unpair(index - 1);
            instructions.push(Instruction::from_code(head));
            index = rest;
        }
        Program { instructions }
    }

    pub(crate) fn compile(&self) -> Compiled {
        let mut slots: BTreeMap<u64, u32> = BTreeMap::new();
        slots.insert(0, 0);
        for r in self.instructions.iter().filter_map(|i| i.register()) {
            let next = slots.len() as u32;
            slots.entry(r).or_insert(next);
        }
        let len = self.instructions.len() as u64;
        let target = |t: u64| if t >= len { HALT } else { t as u32 };
        let ops = self
            .instructions
            .iter()
            .map(|&ins| match ins {
                Instruction::Inc(r) => Op::Inc(slots[&r]),
                Instruction::Djz(r, t) => Op::Djz(slots[&r], target(t)),
                Instruction::Jmp(t) => Op::Jmp(target(t)),
                Instruction::Out(v) => Op::Out(v),
                Instruction::Qry(r) => Op::Qry(slots[&r]),
            })
            .collect();
        Compiled { ops, registers: slots.len() }
    }
}

pub(crate) const HALT: u32 = u32::MAX;

/// Dense-register form used by the interpreter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Op {
    Inc(u32),
    Djz(u32, u32),
    Jmp(u32),
    Out(u64),
    Qry(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compiled {
    pub(crate) ops: Vec<Op>,
    pub(crate) registers: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instruction_codes_round_trip() {
        for c in 0..5000 {
            let ins = Instruction::from_code(c);
            assert_eq!(ins.code(), Some(c));
        }
    }

    #[test]
    fn every_index_decodes_and_re_encodes() {
        for e in 0..20_000u64 {
            assert_eq!(Program::decode(e).encode(), Some(e), "e={e}");
        }
        let big = u64::MAX - 12345;
        assert_eq!(Program::decode(big).encode(), Some(big));
    }

    #[test]
    fn registers_are_compacted() {
        let p = Program::new(alloc::vec![Instruction::Inc(1_000_000), Instruction::Qry(7)]);
        let c = p.compile();
        assert_eq!(c.registers, 3);
        assert_eq!(p.register_count(), 3);
    }
}
