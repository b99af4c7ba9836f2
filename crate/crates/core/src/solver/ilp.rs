//! Integer programming model of the problem, written as CPLEX LP text, and a
//! checker for integral points against the emitted rows plus the lazy cut
//! families.

use std::fmt::Write as _;

use crate::error::Result;
use crate::graph::CompactGraph;
use crate::solver::separation::{separate_integral, CutConstraint, IntegralRoot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize),
    Y(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Which constraint family a row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Exactly one root.
    OneRoot,
    /// Root implies selected.
    RootLink,
    /// Singleton node-separator cut.
    Degree,
    /// Negative nodes are never the root.
    NoNegativeRoot,
    /// Root is the smallest-index positive node.
    Symmetry,
    /// Negative node implies its positive neighbours.
    NegativeNeighbour,
    /// Negative node needs two selected neighbours.
    PassThrough,
    /// Fixed root is selected.
    FixedRoot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub family: Family,
    pub terms: Vec<(f64, Var)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    fn holds(&self, x: &[bool], y: Option<&[bool]>) -> bool {
        let value = |v: Var| match v {
            Var::X(i) => x[i] as u8 as f64,
            Var::Y(i) => y.is_some_and(|y| y[i]) as u8 as f64,
        };
        let lhs: f64 = self.terms.iter().map(|&(c, v)| c * value(v)).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs + 1e-9,
            Sense::Ge => lhs >= self.rhs - 1e-9,
            Sense::Eq => (lhs - self.rhs).abs() <= 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub n: usize,
    pub rooted: bool,
    pub objective: Vec<(f64, Var)>,
    pub rows: Vec<Row>,
}

fn var_name(v: Var) -> String {
    match v {
        Var::X(i) => format!("x{}", i + 1),
        Var::Y(i) => format!("y{}", i + 1),
    }
}

fn write_terms(out: &mut String, terms: &[(f64, Var)]) {
    if terms.is_empty() {
        out.push_str("0 x1");
        return;
    }
    for (k, &(c, v)) in terms.iter().enumerate() {
        let (sign, mag) = if c < 0.0 { ("-", -c) } else { ("+", c) };
        if k == 0 {
            if sign == "-" {
                out.push_str("- ");
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag != 1.0 {
            let _ = write!(out, "{mag} ");
        }
        out.push_str(&var_name(v));
    }
}

impl LinearModel {
    /// LP file text with rows in emission order.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ maximum-weight connected subgraph, {} nodes, {}",
            self.n,
            if self.rooted { "rooted" } else { "unrooted" }
        );
        out.push_str("Maximize\n obj: ");
        write_terms(&mut out, &self.objective);
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}: ", row.name);
            write_terms(&mut out, &row.terms);
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        let vars = self.variables();
        out.push_str("Bounds\n");
        for &v in &vars {
            let _ = writeln!(out, " 0 <= {} <= 1", var_name(v));
        }
        out.push_str("Binaries\n");
        for &v in &vars {
            let _ = writeln!(out, " {}", var_name(v));
        }
        out.push_str("End\n");
        out
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vars: Vec<Var> = (0..self.n).map(Var::X).collect();
        if !self.rooted {
            vars.extend((0..self.n).map(Var::Y));
        }
        vars
    }
}

/// Builds the model without the exponential cut families, which are left to
/// lazy separation. Unrooted rows: one root, root link and singleton cuts;
/// with `strengthen` also no negative root, symmetry breaking, negative
/// neighbour and pass-through rows. Rooted rows: fixed roots and singleton
/// cuts for non-roots; with `strengthen` also negative neighbour rows.
pub fn emit_ilp(g: &CompactGraph, roots: Option<&[usize]>, strengthen: bool) -> LinearModel {
    let n = g.len();
    let objective = (0..n).map(|v| (g.weights[v], Var::X(v))).collect();
    let mut rows = Vec::new();
    let neighbour_terms = |v: usize, coef: f64| -> Vec<(f64, Var)> {
        let mut nb = g.adj[v].clone();
        nb.sort_unstable();
        nb.into_iter().map(|u| (coef, Var::X(u))).collect()
    };
    let negative_neighbour_rows = |rows: &mut Vec<Row>| {
        for v in (0..n).filter(|&v| g.weights[v] < 0.0) {
            let mut nb = g.adj[v].clone();
            nb.sort_unstable();
            for u in nb.into_iter().filter(|&u| g.weights[u] > 0.0) {
                rows.push(Row {
                    name: format!("neg_{}_{}", v + 1, u + 1),
                    family: Family::NegativeNeighbour,
                    terms: vec![(1.0, Var::X(v)), (-1.0, Var::X(u))],
                    sense: Sense::Le,
                    rhs: 0.0,
                });
            }
        }
    };
    match roots.filter(|r| !r.is_empty()) {
        None => {
            rows.push(Row {
                name: "one_root".into(),
                family: Family::OneRoot,
                terms: (0..n).map(|v| (1.0, Var::Y(v))).collect(),
                sense: Sense::Eq,
                rhs: 1.0,
            });
            for v in 0..n {
                rows.push(Row {
                    name: format!("link_{}", v + 1),
                    family: Family::RootLink,
                    terms: vec![(1.0, Var::Y(v)), (-1.0, Var::X(v))],
                    sense: Sense::Le,
                    rhs: 0.0,
                });
            }
            for v in 0..n {
                let mut terms = vec![(1.0, Var::X(v)), (-1.0, Var::Y(v))];
                terms.extend(neighbour_terms(v, -1.0));
                rows.push(Row {
                    name: format!("deg_{}", v + 1),
                    family: Family::Degree,
                    terms,
                    sense: Sense::Le,
                    rhs: 0.0,
                });
            }
            if strengthen {
                for v in (0..n).filter(|&v| g.weights[v] < 0.0) {
                    rows.push(Row {
                        name: format!("noroot_{}", v + 1),
                        family: Family::NoNegativeRoot,
                        terms: vec![(1.0, Var::Y(v))],
                        sense: Sense::Eq,
                        rhs: 0.0,
                    });
                }
                for u in (0..n).filter(|&u| g.weights[u] > 0.0) {
                    let mut terms: Vec<(f64, Var)> = (u + 1..n).map(|v| (1.0, Var::Y(v))).collect();
                    terms.push((1.0, Var::X(u)));
                    rows.push(Row {
                        name: format!("sym_{}", u + 1),
                        family: Family::Symmetry,
                        terms,
                        sense: Sense::Le,
                        rhs: 1.0,
                    });
                }
                negative_neighbour_rows(&mut rows);
                for v in (0..n).filter(|&v| g.weights[v] < 0.0) {
                    let mut terms = vec![(2.0, Var::X(v))];
                    terms.extend(neighbour_terms(v, -1.0));
                    rows.push(Row {
                        name: format!("pass_{}", v + 1),
                        family: Family::PassThrough,
                        terms,
                        sense: Sense::Le,
                        rhs: 0.0,
                    });
                }
            }
        }
        Some(r) => {
            let mut is_root = vec![false; n];
            let mut sorted = r.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            for &v in &sorted {
                is_root[v] = true;
                rows.push(Row {
                    name: format!("root_{}", v + 1),
                    family: Family::FixedRoot,
                    terms: vec![(1.0, Var::X(v))],
                    sense: Sense::Eq,
                    rhs: 1.0,
                });
            }
            for v in (0..n).filter(|&v| !is_root[v]) {
                let mut terms = vec![(1.0, Var::X(v))];
                terms.extend(neighbour_terms(v, -1.0));
                rows.push(Row {
                    name: format!("deg_{}", v + 1),
                    family: Family::Degree,
                    terms,
                    sense: Sense::Le,
                    rhs: 0.0,
                });
            }
            if strengthen {
                negative_neighbour_rows(&mut rows);
            }
        }
    }
    LinearModel {
        n,
        rooted: roots.is_some_and(|r| !r.is_empty()),
        objective,
        rows,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    Row(String),
    Cut(CutConstraint),
}

/// Checks an integral point against every row of `model` and the lazy cut
/// families. Lazy cuts are only examined when `y` names exactly one root.
pub fn check_feasible(
    g: &CompactGraph,
    model: &LinearModel,
    x: &[bool],
    root: IntegralRoot<'_>,
) -> Result<Vec<Violation>> {
    let y = match root {
        IntegralRoot::Y(y) => Some(y),
        IntegralRoot::Set(_) => None,
    };
    let mut out: Vec<Violation> = model
        .rows
        .iter()
        .filter(|r| !r.holds(x, y))
        .map(|r| Violation::Row(r.name.clone()))
        .collect();
    let lazy = match root {
        IntegralRoot::Y(y) if y.iter().filter(|&&b| b).count() != 1 => Vec::new(),
        _ => separate_integral(g, x, root)?,
    };
    out.extend(lazy.into_iter().map(Violation::Cut));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_row_count() {
        let g = CompactGraph::from_edges(vec![1.0, 2.0], &[(0, 1)]);
        let m = emit_ilp(&g, None, false);
        assert_eq!(m.rows.len(), 1 + 2 + 2);
    }

    #[test]
    fn strengthening_rows_are_conditional() {
        let g = CompactGraph::from_edges(vec![3.0, -1.0], &[(0, 1)]);
        let has = |m: &LinearModel, name: &str| m.rows.iter().any(|r| r.name == name);
        let plain = emit_ilp(&g, None, false);
        let strong = emit_ilp(&g, None, true);
        assert!(!has(&plain, "noroot_2") && has(&strong, "noroot_2"));
        assert!(!has(&plain, "neg_2_1") && has(&strong, "neg_2_1"));
        assert!(strong.to_lp().contains(" noroot_2: y2 = 0\n"));
        assert!(strong.to_lp().contains(" neg_2_1: x2 - x1 <= 0\n"));
    }

    #[test]
    fn lp_text_layout() {
        let g = CompactGraph::from_edges(vec![1.5, -2.0], &[(0, 1)]);
        let lp = emit_ilp(&g, Some(&[0]), false).to_lp();
        assert!(lp.contains("Maximize\n obj: 1.5 x1 - 2 x2\n"));
        assert!(lp.contains(" root_1: x1 = 1\n"));
        assert!(lp.contains(" deg_2: x2 - x1 <= 0\n"));
        assert!(lp.ends_with("Binaries\n x1\n x2\nEnd\n"));
    }

    #[test]
    fn disconnected_point_violates_a_cut() {
        let g = CompactGraph::from_edges(vec![1.0; 3], &[(0, 1), (1, 2)]);
        let m = emit_ilp(&g, None, false);
        let v = check_feasible(&g, &m, &[true, false, true], IntegralRoot::Y(&[true, false, false])).unwrap();
        assert!(v.iter().any(|v| matches!(v, Violation::Cut(_))));
        let ok = check_feasible(&g, &m, &[true, true, true], IntegralRoot::Y(&[false, true, false])).unwrap();
        assert!(ok.is_empty());
    }
}
