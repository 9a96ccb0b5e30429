use lieverify::catalog::{default_catalog, verify_entry, VerifyConfig};
use lieverify::determine::closed_form_residual;
use lieverify::liealg::decompose_operator;

fn main() {
    let c = default_catalog();
    for id in std::env::args().skip(1) {
        let e = c.get(&id).expect("no such entry");
        let r = verify_entry(e, &VerifyConfig::default());
        println!("== {id}: {}", r.outcome().label());
        let b = &r.bindings[0];
        println!("binding {:?}", b.binding.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>());
        for g in &b.generators {
            println!("  gen {g}");
        }
        println!("  F = {}", b.f);
        println!("  algebra: {:?} {}", b.algebra.matched, b.algebra.constants.as_ref().map(|c| c.to_string()).unwrap_or_else(|| format!("{:?}", b.algebra.error)));
        for (i, p) in b.pairs.iter().enumerate() {
            if !p.passes() {
                let op = decompose_operator(&b.generators[i]).unwrap();
                let res = closed_form_residual(&op, &b.f).unwrap();
                println!("  gen{} residual: {}", i + 1, res.expr);
            }
        }
    }
}
