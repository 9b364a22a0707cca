//! Searches random small updates for two footprints whose intersection is not
//! a footprint, and prints the first instance found.
//!
//! ```text
//! cargo run -p flowfoot-core --example find_non_closed -- [seed] [tries] [monoid]
//! ```
//!
//! `fixtures/non_closed.json` is the first hit for seed 0 and the maxcap
//! monoid.

use flowfoot_core::harness::{serialize_instance, Instance};
use flowfoot_core::oracle::{oracle_footprints, EnumBudget};
use flowfoot_core::random::{mutate, random_graph, Shape};
use flowfoot_core::MonoidTag;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let tries: usize = args.next().map_or(20_000, |s| s.parse().expect("tries"));
    let monoids: Vec<MonoidTag> = match args.next() {
        Some(m) => vec![m.parse().expect("monoid")],
        None => MonoidTag::ALL.to_vec(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape::default().nodes(2, 4);
    let budget = EnumBudget::default();

    for i in 0..tries {
        let tag = monoids[i % monoids.len()];
        let h1 = random_graph(tag, &shape, &mut rng);
        let h2 = mutate(&h1, &shape, &mut rng);
        let Ok(fp) = oracle_footprints(&h1, &h2, &budget) else {
            continue;
        };
        for a in &fp {
            for b in &fp {
                let meet = a.intersection(b).copied().collect();
                if !fp.contains(&meet) {
                    let names = |s: &flowfoot_core::NodeSet| {
                        format!("{:?}", s.iter().map(|x| x.0).collect::<Vec<_>>())
                    };
                    eprintln!(
                        "try {i}: {} and {} are footprints, {} is not",
                        names(a),
                        names(b),
                        names(&meet)
                    );
                    let inst = Instance::new(format!("non-closed-{seed}-{i}"), h1, h2)
                        .expect("same nodes and inflow");
                    print!("{}", serialize_instance(&inst));
                    return;
                }
            }
        }
    }
    eprintln!("nothing found in {tries} tries");
    std::process::exit(1);
}
