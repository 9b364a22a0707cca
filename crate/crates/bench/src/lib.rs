//! Shared inputs for the criterion benchmarks.

use flowfoot_core::harness::{cyclic_suite, gen_list_update, Instance, ListOp};

/// Fixed seed so runs compare like with like.
pub const SEED: u64 = 0x5eed;

/// One update of each kind on lists of the given lengths.
pub fn list_updates(lengths: &[usize]) -> Vec<Instance> {
    lengths
        .iter()
        .flat_map(|&n| ListOp::ALL.into_iter().map(move |op| (n, op)))
        .map(|(n, op)| gen_list_update(op, n, SEED).expect("lengths are in range"))
        .collect()
}

pub fn cyclic_updates(count: usize) -> Vec<Instance> {
    cyclic_suite(count, SEED)
}
