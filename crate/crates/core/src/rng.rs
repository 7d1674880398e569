//! Seed-keyed random streams. Each party draws from its own ChaCha20
//! stream selected by role and index, so results never depend on the
//! order in which parties run.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Source 1, holder of `A`.
    SourceA,
    /// Source 2, holder of `B`.
    SourceB,
    /// Worker `n` (zero-based).
    Worker(u32),
    /// Evaluation point selection.
    Setup,
    /// Subset sampling in the privacy auditor.
    Audit,
    /// Random input matrices generated by the command line.
    Inputs,
}

impl Role {
    fn stream_id(self) -> u64 {
        match self {
            Role::SourceA => 1,
            Role::SourceB => 2,
            Role::Setup => 3,
            Role::Audit => 4,
            Role::Inputs => 5,
            Role::Worker(n) => (1 << 32) | n as u64,
        }
    }
}

pub fn stream(seed: u64, role: Role) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(role.stream_id());
    rng
}
