use lieverify::catalog::{default_catalog, load_catalog, verify_catalog, VerifyConfig};

fn main() {
    let c = match std::env::args().nth(1) {
        Some(p) => load_catalog(p.as_ref()).unwrap(),
        None => default_catalog(),
    };
    let start = std::time::Instant::now();
    let r = verify_catalog(&c.entries, &VerifyConfig::default());
    print!("{}", r.to_text());
    eprintln!("elapsed {:?}", start.elapsed());
}
