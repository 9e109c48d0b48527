use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{adversaries, FuelResult, Machine, Program};
use crate::NatSetPrefix;

/// The indexed family `Φ_0, Φ_1, …`.
///
/// Index `e` runs [`Program::decode`]`(e)` unless a finite override table
/// pins a named program to it.
#[derive(Clone, Debug, Default)]
pub struct MachineUniverse {
    overrides: BTreeMap<u64, (String, Program)>,
}

impl MachineUniverse {
    /// Plain canonical numbering, no overrides.
    pub fn canonical() -> Self {
        Self::default()
    }

    /// Canonical numbering with designed opponents on the low indices:
    ///
    /// | e | name | behaviour |
    /// |---|------|-----------|
    /// | 0 | `never` | diverges everywhere |
    /// | 1 | `const0` | total, constant 0, one step |
    /// | 2 | `const1` | total, constant 1, one step |
    /// | 3 | `omega` | halts at once with its input; `W_{3,s} = [0,s)` |
    /// | 4 | `evens` | halts exactly on even inputs |
    /// | 5 | `parity` | total, 1 iff the input is even |
    /// | 6 | `above25` | halts exactly on inputs `> 25` |
    /// | 7 | `countdown` | total, about `x` steps on input `x` |
    pub fn standard() -> Self {
        Self::canonical()
            .with_program(0, "never", adversaries::never())
            .with_program(1, "const0", adversaries::constant(0))
            .with_program(2, "const1", adversaries::constant(1))
            .with_program(3, "omega", adversaries::identity())
            .with_program(4, "evens", adversaries::evens_domain())
            .with_program(5, "parity", adversaries::parity())
            .with_program(6, "above25", adversaries::above(25))
            .with_program(7, "countdown", adversaries::countdown())
    }

    pub fn with_program(mut self, e: u64, name: &str, program: Program) -> Self {
        self.overrides.insert(e, (name.to_string(), program));
        self
    }

    pub fn set_program(&mut self, e: u64, name: &str, program: Program) {
        self.overrides.insert(e, (name.to_string(), program));
    }

    pub fn program(&self, e: u64) -> Program {
        match self.overrides.get(&e) {
            Some((_, p)) => p.clone(),
            None => Program::decode(e),
        }
    }

    pub fn name(&self, e: u64) -> Option<&str> {
        self.overrides.get(&e).map(|(n, _)| n.as_str())
    }

    pub fn overridden(&self) -> Vec<u64> {
        self.overrides.keys().copied().collect()
    }

    pub fn machine(&self, e: u64) -> Machine {
        Machine::new(&self.program(e))
    }

    /// `Φ_{e,s}(x)`.
    pub fn eval(&self, e: u64, x: u64, s: u64) -> FuelResult {
        self.machine(e).eval(x, s)
    }

    /// `Φ^A_{e,s}(x)` for a total oracle; oracle failures propagate.
    pub fn eval_oracle<E>(
        &self,
        e: u64,
        x: u64,
        s: u64,
        oracle: &mut impl FnMut(u64) -> Result<bool, E>,
    ) -> Result<FuelResult, E> {
        self.machine(e).eval_oracle(x, s, oracle)
    }

    /// `W_{e,s} = {x < s : Φ_{e,s}(x)↓}`.
    pub fn we_stage(&self, e: u64, s: u64) -> NatSetPrefix {
        self.machine(e).we_stage(s)
    }
}
