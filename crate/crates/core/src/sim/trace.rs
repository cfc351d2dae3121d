use std::collections::BTreeMap;
use std::io::Write;

use crate::compiler::{find_legs, CompiledProgram};
use crate::sim::Timeline;

/// Writes one CSV row per executed instruction.
pub fn write_trace<W: Write>(prog: &CompiledProgram, tl: &Timeline, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "id",
        "kind",
        "op",
        "role",
        "start_us",
        "end_us",
        "location",
        "chain_n",
        "n_bar",
        "fidelity",
        "err_background",
        "err_motional",
    ])?;
    for (i, (ins, e)) in prog.instructions.iter().zip(&tl.entries).enumerate() {
        let role = serde_json::to_value(ins.role)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        w.write_record([
            i.to_string(),
            ins.kind.name().to_string(),
            ins.op.to_string(),
            role,
            e.start_us.to_string(),
            e.end_us.to_string(),
            e.location.clone(),
            e.step.chain_n.to_string(),
            e.step.n_bar.to_string(),
            e.step.fidelity.to_string(),
            e.step.background.to_string(),
            e.step.motional.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Resource {
    Ion(usize),
    Node(usize),
    Segment(usize),
}

/// Checks that no two instructions hold the same ion, trap, segment or
/// junction over overlapping intervals, and that a shuttle's route is held
/// from its split to its merge.
pub fn audit(prog: &CompiledProgram, tl: &Timeline) -> Result<(), String> {
    let mut use_of: BTreeMap<Resource, Vec<(f64, f64, usize)>> = BTreeMap::new();
    for (i, e) in tl.entries.iter().enumerate() {
        for &ion in &e.ions {
            use_of.entry(Resource::Ion(ion)).or_default().push((e.start_us, e.end_us, i));
        }
        if let Some(t) = e.trap {
            use_of.entry(Resource::Node(t.0)).or_default().push((e.start_us, e.end_us, i));
        }
    }
    let legs = find_legs(&prog.instructions).map_err(|(i, m)| format!("instruction {i}: {m}"))?;
    for leg in &legs {
        let (s, m) = (&tl.entries[leg.split], &tl.entries[leg.merge]);
        for seg in &leg.segments {
            use_of
                .entry(Resource::Segment(seg.0))
                .or_default()
                .push((s.start_us, m.end_us, leg.split));
        }
        for j in &leg.junctions {
            use_of
                .entry(Resource::Node(j.0))
                .or_default()
                .push((s.start_us, m.end_us, leg.split));
        }
    }
    const EPS: f64 = 1e-9;
    for (res, mut spans) in use_of {
        spans.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
        for w in spans.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b.0 < a.1 - EPS {
                return Err(format!(
                    "{res:?} is held by instruction {} over [{}, {}) and instruction {} from {}",
                    a.2, a.0, a.1, b.2, b.0
                ));
            }
        }
    }
    Ok(())
}
