//! Trajectory CSV export and import.
//!
//! Floats are written with Rust's shortest round-trip formatting so a
//! re-read trajectory is bit-identical to the one in memory.

use std::io::{Read, Write};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use hynav::controller::{HybridState, Mode};
use hynav::simulator::Sample;
use hynav::world::World;
use hynav::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Row {
    t: f64,
    j: usize,
    m: u8,
    x: f64,
    y: f64,
    z: f64,
    hx: f64,
    hy: f64,
    hz: f64,
    ax: f64,
    ay: f64,
    az: f64,
    s: f64,
    gap: f64,
    ux: f64,
    uy: f64,
    uz: f64,
}

pub fn write_csv<W: Write>(samples: &[Sample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        let st = &s.state;
        w.serialize(Row {
            t: s.t,
            j: s.j,
            m: st.m.index(),
            x: st.x.x,
            y: st.x.y,
            z: st.x.z,
            hx: st.h.x,
            hy: st.h.y,
            hz: st.h.z,
            ax: st.a.x,
            ay: st.a.y,
            az: st.a.z,
            s: st.s,
            gap: s.gap,
            ux: s.u.x,
            uy: s.u.y,
            uz: s.u.z,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads samples back. `s0` is taken from the first row and the nearest
/// obstacle index is recomputed from `world`.
pub fn read_csv<R: Read>(input: R, world: &World) -> Result<Vec<Sample>> {
    let mut r = csv::Reader::from_reader(input);
    let mut samples = Vec::new();
    let mut s0 = None;
    for (k, row) in r.deserialize::<Row>().enumerate() {
        let row = row.with_context(|| format!("row {}", k + 1))?;
        let m = Mode::from_index(row.m).with_context(|| format!("row {}: mode {}", k + 1, row.m))?;
        let s0 = *s0.get_or_insert(row.s);
        let x = Vec3::new(row.x, row.y, row.z);
        samples.push(Sample {
            t: row.t,
            j: row.j,
            state: HybridState {
                x,
                h: Vec3::new(row.hx, row.hy, row.hz),
                a: Vec3::new(row.ax, row.ay, row.az),
                m,
                s: row.s,
                s0,
            },
            u: Vec3::new(row.ux, row.uy, row.uz),
            gap: row.gap,
            nearest_index: world.nearest_obstacle(&x).map(|h| h.obstacle_index),
        });
    }
    Ok(samples)
}
