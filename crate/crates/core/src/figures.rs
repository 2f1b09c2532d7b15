//! CSV point sets for plotting colored De Bruijn graphs and region surfaces.

use std::io::Write;

use crate::debruijn::{five_cycle_partition, mono_fraction, Coloring, Variant};
use crate::error::Result;
use crate::model::Oracle;

/// Which figure to export.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureKind {
    /// `DB_normal(2)` with an optimal coloring.
    Normal2,
    /// `DB_distinct(5)` with the 24-edge coloring and its 5-cycle partition.
    Distinct5,
}

impl std::str::FromStr for FigureKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal2" => Ok(FigureKind::Normal2),
            "distinct5" => Ok(FigureKind::Distinct5),
            other => Err(crate::Error::invalid(format!("unknown figure {other:?} (expected normal2, distinct5 or region)"))),
        }
    }
}

/// Vertex and edge rows of a colored graph.
///
/// Columns: `kind,id,label,from,to,color,monochromatic,cycle`. Vertex rows
/// fill `label` (`a b c`) and `color`; edge rows fill `label` (`a b c d`),
/// the endpoint ids, `monochromatic` and, for `DB_distinct(5)`, the index of
/// the 5-cycle containing the edge.
pub fn write_graph_csv(coloring: &Coloring, mut out: impl Write) -> Result<()> {
    let spec = *coloring.spec();
    let cycles = (spec.variant() == Variant::Distinct && spec.n() == 5).then(|| five_cycle_partition(&spec)).transpose()?;
    writeln!(out, "kind,id,label,from,to,color,monochromatic,cycle")?;
    for (i, t) in spec.vertices().enumerate() {
        writeln!(out, "vertex,{i},{} {} {},,,{},,", t.a, t.b, t.c, u8::from(coloring.get(t)))?;
    }
    for (j, (u, v)) in spec.edges().enumerate() {
        let from = spec.index(u).expect("edge endpoints are vertices");
        let to = spec.index(v).expect("edge endpoints are vertices");
        let mono = coloring.get(u) == coloring.get(v);
        let cycle = cycles
            .as_ref()
            .and_then(|cs| cs.iter().position(|c| c.edges().contains(&(u, v))))
            .map_or_else(String::new, |k| k.to_string());
        writeln!(out, "edge,{j},{} {} {} {},{from},{to},,{},{cycle}", u.a, u.b, u.c, v.c, u8::from(mono))?;
    }
    Ok(())
}

/// Color changes of `f` along the last coordinate on an `m × m × m` grid of
/// cell centers.
///
/// Columns: `x,y,z,direction`. A row says that between the cells at heights
/// `z - 1/(2m)` and `z + 1/(2m)` above `(x, y)` the output switches, `up`
/// meaning from 0 to 1. For a monotone region this is its boundary surface.
pub fn write_region_mesh(f: &dyn Oracle, m: usize, mut out: impl Write) -> Result<()> {
    if m == 0 {
        return Err(crate::Error::invalid("mesh resolution must be positive"));
    }
    let center = |i: usize| (i as f64 + 0.5) / m as f64;
    writeln!(out, "x,y,z,direction")?;
    for i in 0..m {
        for j in 0..m {
            let mut prev = f.eval(center(i), center(j), center(0));
            for k in 1..m {
                let cur = f.eval(center(i), center(j), center(k));
                if cur != prev {
                    let dir = if cur { "up" } else { "down" };
                    writeln!(out, "{},{},{},{dir}", center(i), center(j), k as f64 / m as f64)?;
                }
                prev = cur;
            }
        }
    }
    Ok(())
}

/// A one-line summary for a coloring figure.
pub fn caption(coloring: &Coloring) -> String {
    let s = mono_fraction(coloring);
    format!("{}: {} vertices, {} of {} edges monochromatic", coloring.spec(), coloring.spec().vertex_count(), s.mono_edges, s.total_edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::debruijn::{distinct5_optimal_coloring, normal2_optimal_coloring};

    fn rows(text: &str, kind: &str) -> usize {
        text.lines().filter(|l| l.starts_with(kind)).count()
    }

    #[test]
    fn distinct5_rows() {
        let mut buf = Vec::new();
        write_graph_csv(&distinct5_optimal_coloring(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(rows(&text, "vertex,"), 60);
        assert_eq!(rows(&text, "edge,"), 120);
        let mono = text.lines().filter(|l| l.starts_with("edge,") && l.split(',').nth(6) == Some("1")).count();
        assert_eq!(mono, 24);
        // every cycle holds exactly one monochromatic edge
        let mut per_cycle = [0; 24];
        for l in text.lines().filter(|l| l.starts_with("edge,")) {
            let f: Vec<&str> = l.split(',').collect();
            if f[6] == "1" {
                per_cycle[f[7].parse::<usize>().unwrap()] += 1;
            }
        }
        assert!(per_cycle.iter().all(|&c| c == 1));
    }

    #[test]
    fn normal2_rows() {
        let mut buf = Vec::new();
        write_graph_csv(&normal2_optimal_coloring(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(rows(&text, "vertex,"), 8);
        assert_eq!(rows(&text, "edge,"), 16);
        assert!(caption(&normal2_optimal_coloring()).contains("4 of 16"));
    }

    #[test]
    fn mesh_of_a_plane() {
        let f = |_: f64, _: f64, c: f64| c >= 0.5;
        let mut buf = Vec::new();
        write_region_mesh(&f, 4, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 16);
        assert!(text.lines().skip(1).all(|l| l.ends_with(",0.5,up")));
    }
}
