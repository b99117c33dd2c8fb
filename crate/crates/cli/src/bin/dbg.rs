use ila_cli::config::SchemeConfig;
use ila_cli::fuzz::fuzz_campaign;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let preset = args.get(1).map(String::as_str).unwrap_or("presets/bgv_d16_t16.json");
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(100);
    let force = args.get(3).map(|s| s == "force").unwrap_or(false);
    let cfg = SchemeConfig::load(std::path::Path::new(preset)).unwrap();
    let t0 = Instant::now();
    let out = fuzz_campaign(&cfg, n, 0x5eed, force).unwrap();
    println!(
        "{preset}: {} circuits, {} trace checks, {} equiv checks, {} rejected, {} dyn mismatches in {:.1}s",
        out.circuits, out.trace_checks, out.equivalence_checks, out.rejected_circuits,
        out.dynamic_mismatches, t0.elapsed().as_secs_f64()
    );
    for v in out.soundness_violations.iter().take(4) { println!("SOUND: {v}"); }
    for v in out.equivalence_failures.iter().take(4) { println!("EQUIV: {v}"); }
    for v in out.unrejected_mismatches.iter().take(4) { println!("COMPLETE: {v}"); }
    assert!(out.clean(), "violations found");
}
