//! One input pair of a built-in gate, with an ASCII map of the final layout.
//!
//!     cargo run --release --example gate_row -- xor dirichlet 1 0 [iters]

use heat_logic::gates::{run_row, BcKind, GateKind, GateSpec};

fn main() -> heat_logic::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let kind: GateKind = arg(0, "xor").parse()?;
    let bc: BcKind = arg(1, "dirichlet").parse()?;
    let (x, y) = (arg(2, "1") == "1", arg(3, "0") == "1");
    let spec = GateSpec::build(kind, bc);
    let mut params = spec.default_params();
    if let Some(n) = args.get(4) {
        params.max_iters = n.parse().expect("iteration count");
    }

    let outcome = run_row(&spec, &params, x, y)?;
    let rho = outcome.trace.final_state.values();

    // 4×4 blocks, strongest element wins
    let (bw, bh) = (spec.nx / 4, spec.ny / 4);
    for br in (0..bh).rev() {
        let mut line: Vec<char> = (0..bw)
            .map(|bc| {
                let mut m = 0.0f64;
                for r in 4 * br..4 * br + 4 {
                    for c in 4 * bc..4 * bc + 4 {
                        m = m.max(rho[r * spec.nx + c]);
                    }
                }
                if m > 0.9 { '#' } else if m > 0.5 { '+' } else if m > 0.05 { '.' } else { ' ' }
            })
            .collect();
        for s in spec.sites.iter().filter(|s| s.row / 4 == br) {
            line[s.col / 4] = s.name.chars().last().unwrap_or('*');
        }
        if line.iter().any(|&c| c != ' ') {
            println!("{:3} |{}|", 4 * br, line.into_iter().collect::<String>());
        }
    }
    println!("{} after {} iterations", outcome.trace.termination, outcome.trace.iterations());
    for r in &outcome.readout.outputs {
        println!("{} = {} (rho {:.3})", r.name, r.value as u8, r.density);
    }
    Ok(())
}
