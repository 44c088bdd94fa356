//! Mixed stabilizer states: a Bell pair, the two noise channels and a
//! measurement, with entropies printed after each step.
//!
//! cargo run --example tableau_basics

use mixstab::{derive_stream, MixedStabilizerState, Region, SeedSpec};

fn show(label: &str, s: &MixedStabilizerState) {
    let e = |sites: &[usize]| s.entropy(&Region::new(sites.iter().copied()));
    println!(
        "{label:<28} S(0) = {}  S(1) = {}  S(01) = {}  generators: {}",
        e(&[0]),
        e(&[1]),
        e(&[0, 1]),
        s.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
    );
}

fn main() {
    let mut rng = derive_stream(SeedSpec::new(1, 0));
    let mut s = MixedStabilizerState::new_product_state(2).unwrap();
    show("|00>", &s);
    s.apply_h(0).unwrap();
    s.apply_cnot(0, 1).unwrap();
    show("Bell pair", &s);

    let mut d = s.clone();
    d.dephase(0).unwrap();
    show("dephase qubit 0", &d);

    let mut r = s.clone();
    r.reset(0).unwrap();
    show("reset qubit 0", &r);

    let m = s.measure_z(1, &mut rng).unwrap();
    show(&format!("measure Z1 -> {:+}", m.outcome.value()), &s);

    let mixed = MixedStabilizerState::new_maximally_mixed(130).unwrap();
    println!(
        "maximally mixed, 130 qubits: total entropy {}, S(first 65) = {}",
        mixed.total_entropy(),
        mixed.entropy(&Region::range(0..65))
    );
}
