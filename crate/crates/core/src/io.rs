//! CSV serialization for the artifact's file interfaces.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output
//! bytes are a pure function of the values.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::completion::TraceRow;
use crate::error::{Error, Result};
use crate::evidence::{FrameOfDiscernment, MassFunction};
use crate::network::NetworkGraph;
use crate::protocol::{MessageKind, Payload, Transcript};

/// Mass function rows: `subset_bitmask,mass`.
pub fn write_mass_csv<W: Write>(w: &mut W, m: &MassFunction<f64>) -> Result<()> {
    writeln!(w, "subset_bitmask,mass")?;
    for (subset, &mass) in m.masses().iter().enumerate() {
        if subset != 0 {
            writeln!(w, "{subset},{mass}")?;
        }
    }
    Ok(())
}

pub fn read_mass_csv<R: BufRead>(
    r: R,
    frame: std::sync::Arc<FrameOfDiscernment>,
) -> Result<MassFunction<f64>> {
    let mut masses = vec![0.0; frame.num_subsets()];
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if idx == 0 || line.is_empty() {
            continue;
        }
        let (subset, mass) = line
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("bad mass row `{line}`")))?;
        let subset: usize = subset
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad subset `{subset}`")))?;
        if subset >= masses.len() {
            return Err(Error::Config(format!("subset {subset} outside the frame")));
        }
        masses[subset] = mass
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad mass `{mass}`")))?;
    }
    MassFunction::new(frame, masses)
}

/// Frames serialize as the ordered label list, one label per line.
pub fn write_labels<W: Write>(w: &mut W, frame: &FrameOfDiscernment) -> Result<()> {
    for label in frame.labels() {
        writeln!(w, "{label}")?;
    }
    Ok(())
}

pub fn read_labels<R: BufRead>(r: R) -> Result<std::sync::Arc<FrameOfDiscernment>> {
    let mut labels = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if !line.is_empty() {
            labels.push(line.to_string());
        }
    }
    FrameOfDiscernment::new(labels)
}

/// Dense matrix: one row per line, comma-separated, no header.
pub fn write_matrix_csv<W: Write>(w: &mut W, m: &DMatrix<f64>) -> Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_matrix_csv<R: BufRead>(r: R) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in r.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        rows.push(row.map_err(|_| Error::Config(format!("bad matrix row `{line}`")))?);
    }
    if rows.is_empty() {
        return Err(Error::Config("empty matrix file".into()));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Config("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Graph edge list: `i,j` with a header.
pub fn write_edges_csv<W: Write>(w: &mut W, g: &NetworkGraph) -> Result<()> {
    writeln!(w, "i,j")?;
    for (i, j) in g.edges() {
        writeln!(w, "{i},{j}")?;
    }
    Ok(())
}

pub fn read_edges_csv<R: BufRead>(r: R, n_agents: usize) -> Result<NetworkGraph> {
    let mut edges = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if idx == 0 || line.is_empty() {
            continue;
        }
        let (i, j) = line
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("bad edge row `{line}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad agent id `{v}`")))
        };
        edges.push((parse(i)?, parse(j)?));
    }
    NetworkGraph::from_edges(n_agents, &edges)
}

fn kind_name(kind: MessageKind) -> &'static str {
    match kind {
        MessageKind::SelfInnerProduct => "self_inner_product",
        MessageKind::MaskedVectorComponent => "masked_vector_component",
        MessageKind::MaskedScalar => "masked_scalar",
        MessageKind::SharedDotResult => "shared_dot_result",
        MessageKind::EqualityNonce => "equality_nonce",
        MessageKind::BlindedIndex => "blinded_index",
        MessageKind::DoubleBlindedIndex => "double_blinded_index",
        MessageKind::EqualityOutcome => "equality_outcome",
        MessageKind::MaxPignistic => "max_pignistic",
    }
}

/// Protocol transcript: `step,sender,receiver,kind,value`; group elements
/// and nonces as hex digests.
pub fn write_transcript_csv<W: Write>(w: &mut W, t: &Transcript<f64>) -> Result<()> {
    writeln!(w, "step,sender,receiver,kind,value")?;
    for e in t.entries() {
        let value = match e.payload {
            Payload::Scalar(v) => v.to_string(),
            Payload::Hex(v) => format!("{v:016x}"),
            Payload::Flag(v) => v.to_string(),
        };
        writeln!(
            w,
            "{},{},{},{},{}",
            e.step,
            e.sender,
            e.receiver,
            kind_name(e.kind),
            value
        )?;
    }
    Ok(())
}

/// Completion trace: `iter,rank,objective`.
pub fn write_rank_trace_csv<W: Write>(w: &mut W, trace: &[TraceRow<f64>]) -> Result<()> {
    writeln!(w, "iter,rank,objective")?;
    for row in trace {
        writeln!(w, "{},{},{}", row.iter, row.rank, row.objective)?;
    }
    Ok(())
}

/// Per-agent credibility comparison: `agent,cred_pcef,cred_ccef,abs_error`.
pub fn write_credibility_csv<W: Write>(
    w: &mut W,
    cred_pcef: &[f64],
    cred_ccef: &[f64],
) -> Result<()> {
    writeln!(w, "agent,cred_pcef,cred_ccef,abs_error")?;
    for (agent, (p, c)) in cred_pcef.iter().zip(cred_ccef).enumerate() {
        writeln!(w, "{agent},{p},{c},{}", (p - c).abs())?;
    }
    Ok(())
}

/// Fused masses side by side: `subset_bitmask,mass_pcef,mass_ccef,mass_dr`.
pub fn write_fusion_csv<W: Write>(
    w: &mut W,
    pcef: &MassFunction<f64>,
    ccef: &MassFunction<f64>,
    dr: &MassFunction<f64>,
) -> Result<()> {
    writeln!(w, "subset_bitmask,mass_pcef,mass_ccef,mass_dr")?;
    for subset in 1..pcef.frame().num_subsets() {
        writeln!(
            w,
            "{subset},{},{},{}",
            pcef.mass(subset),
            ccef.mass(subset),
            dr.mass(subset)
        )?;
    }
    Ok(())
}

/// One decision row per trial and method.
pub struct DecisionRow {
    pub trial: usize,
    pub method: &'static str,
    pub decision: usize,
    pub truth: usize,
}

/// Decisions: `trial,method,decision,truth,correct`.
pub fn write_decisions_csv<W: Write>(w: &mut W, rows: &[DecisionRow]) -> Result<()> {
    writeln!(w, "trial,method,decision,truth,correct")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.trial,
            r.method,
            r.decision,
            r.truth,
            r.decision == r.truth
        )?;
    }
    Ok(())
}

/// One attack attempt.
pub struct AttackRow {
    pub adversary: usize,
    pub target: usize,
    pub feasible: bool,
    pub max_abs_error: Option<f64>,
}

/// Attack report: `adversary,target,feasible,max_abs_error` (error blank
/// when the attack is infeasible).
pub fn write_attack_report_csv<W: Write>(w: &mut W, rows: &[AttackRow]) -> Result<()> {
    writeln!(w, "adversary,target,feasible,max_abs_error")?;
    for r in rows {
        let err = r.max_abs_error.map(|e| e.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{}", r.adversary, r.target, r.feasible, err)?;
    }
    Ok(())
}

/// Consensus state traces: `round,agent,component,value`.
pub fn write_state_trace_csv<W: Write>(
    w: &mut W,
    states_per_round: &[Vec<nalgebra::DVector<f64>>],
) -> Result<()> {
    writeln!(w, "round,agent,component,value")?;
    for (round, states) in states_per_round.iter().enumerate() {
        for (agent, x) in states.iter().enumerate() {
            for (component, &value) in x.iter().enumerate() {
                writeln!(w, "{round},{agent},{component},{value}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::BufReader;

    #[test]
    fn mass_roundtrip() {
        let f = FrameOfDiscernment::new(["a", "b"]).unwrap();
        let m = MassFunction::from_focal(f.clone(), &[(1, 0.4), (3, 0.6)]).unwrap();
        let mut buf = Vec::new();
        write_mass_csv(&mut buf, &m).unwrap();
        let back = read_mass_csv(BufReader::new(&buf[..]), f).unwrap();
        assert!(m.max_abs_diff(&back) <= 1e-15);
    }

    #[test]
    fn matrix_roundtrip() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.25, 1e-17, 3.5, -0.125, 2.0]);
        let mut buf = Vec::new();
        write_matrix_csv(&mut buf, &m).unwrap();
        let back = read_matrix_csv(BufReader::new(&buf[..])).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn edges_roundtrip() {
        let g = NetworkGraph::ring(6).unwrap();
        let mut buf = Vec::new();
        write_edges_csv(&mut buf, &g).unwrap();
        let back = read_edges_csv(BufReader::new(&buf[..]), 6).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn labels_roundtrip() {
        let f = FrameOfDiscernment::new(["alpha", "beta", "gamma"]).unwrap();
        let mut buf = Vec::new();
        write_labels(&mut buf, &f).unwrap();
        let back = read_labels(BufReader::new(&buf[..])).unwrap();
        assert_eq!(*f, *back);
    }
}
