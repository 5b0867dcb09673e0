use std::collections::BTreeMap;

use crate::error::{KmpError, Result};
use crate::instance::KmpInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectiveSense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Ge,
}

impl RowSense {
    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            RowSense::Le => lhs <= rhs,
            RowSense::Ge => lhs >= rhs,
        }
    }
}

/// One linear row. Coefficients are sorted by variable index with no zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// A pure binary linear program.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    sense: ObjectiveSense,
    variables: Vec<String>,
    var_index: BTreeMap<String, usize>,
    objective: Vec<(usize, f64)>,
    constraints: Vec<Constraint>,
}

fn normalize(mut coeffs: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    coeffs.sort_by_key(|&(v, _)| v);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
    for (v, c) in coeffs {
        match out.last_mut() {
            Some(last) if last.0 == v => last.1 += c,
            _ => out.push((v, c)),
        }
    }
    out.retain(|&(_, c)| c != 0.0);
    out
}

impl IlpModel {
    pub fn new(sense: ObjectiveSense) -> Self {
        IlpModel {
            sense,
            variables: Vec::new(),
            var_index: BTreeMap::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    /// Declares a binary variable and returns its column.
    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<usize> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(KmpError::InvalidInstance(format!(
                "variable name `{name}` must be non-empty without whitespace"
            )));
        }
        if self.var_index.contains_key(&name) {
            return Err(KmpError::InvalidInstance(format!(
                "duplicate variable `{name}`"
            )));
        }
        let idx = self.variables.len();
        self.var_index.insert(name.clone(), idx);
        self.variables.push(name);
        Ok(idx)
    }

    pub fn set_objective(&mut self, coeffs: Vec<(usize, f64)>) -> Result<()> {
        self.check_columns(&coeffs)?;
        self.objective = normalize(coeffs);
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> Result<()> {
        self.check_columns(&coeffs)?;
        self.constraints.push(Constraint {
            name: name.into(),
            coeffs: normalize(coeffs),
            sense,
            rhs,
        });
        Ok(())
    }

    fn check_columns(&self, coeffs: &[(usize, f64)]) -> Result<()> {
        match coeffs.iter().find(|&&(v, _)| v >= self.variables.len()) {
            Some(&(v, _)) => Err(KmpError::IndexOutOfRange {
                index: v,
                limit: self.variables.len(),
            }),
            None => Ok(()),
        }
    }

    pub fn sense(&self) -> ObjectiveSense {
        self.sense
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.var_index.get(name).copied()
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Objective value of a 0/1 point, or `None` if some row is violated.
    pub fn evaluate_point(&self, point: &[bool]) -> Option<f64> {
        let dot = |coeffs: &[(usize, f64)]| -> f64 {
            coeffs.iter().filter(|&&(v, _)| point[v]).map(|&(_, c)| c).sum()
        };
        self.constraints
            .iter()
            .all(|r| r.sense.holds(dot(&r.coeffs), r.rhs))
            .then(|| dot(&self.objective))
    }
}

pub fn x_name(i: usize, k: usize) -> String {
    format!("x_{i}_{k}")
}

pub fn z_name(i: usize, j: usize) -> String {
    format!("z_{i}_{j}")
}

pub fn y_name(i: usize, j: usize, k: usize) -> String {
    format!("y_{i}_{j}_{k}")
}

/// Builds the linearized program: every product x_ik x_jk over an edge is
/// replaced by y_ijk with y <= x_ik, y <= x_jk, y >= x_ik + x_jk - 1.
///
/// Columns: x (vertex-major), then z (edge order), then y (edge-major, key
/// minor). Rows, in order: capacity per vertex, sharing per edge,
/// neighborhood use per (vertex, key), the three product rows per (edge, key),
/// usage per key.
pub fn build_ilp(inst: &KmpInstance) -> IlpModel {
    build(inst).expect("generated names are unique and columns in range")
}

fn build(inst: &KmpInstance) -> Result<IlpModel> {
    let g = inst.graph();
    let n = g.vertex_count();
    let kc = inst.key_count();
    let edges = g.edges();
    let mut m = IlpModel::new(ObjectiveSense::Maximize);

    for i in 0..n {
        for k in 0..kc {
            m.add_binary(x_name(i, k))?;
        }
    }
    let x = |i: usize, k: usize| i * kc + k;
    let z_base = n * kc;
    for &(i, j) in edges {
        m.add_binary(z_name(i, j))?;
    }
    let y_base = z_base + edges.len();
    for &(i, j) in edges {
        for k in 0..kc {
            m.add_binary(y_name(i, j, k))?;
        }
    }
    let y = |e: usize, k: usize| y_base + e * kc + k;

    m.set_objective((0..edges.len()).map(|e| (z_base + e, 1.0)).collect())?;

    for i in 0..n {
        let row = (0..kc)
            .map(|k| (x(i, k), f64::from(inst.mem_per_key()[k])))
            .collect();
        m.add_constraint(
            format!("cap_{i}"),
            row,
            RowSense::Le,
            f64::from(inst.capacity()[i]),
        )?;
    }

    let q = f64::from(inst.q());
    for (e, &(i, j)) in edges.iter().enumerate() {
        let mut row: Vec<_> = (0..kc).map(|k| (y(e, k), 1.0)).collect();
        row.push((z_base + e, -q));
        m.add_constraint(format!("shr_{i}_{j}"), row, RowSense::Ge, 0.0)?;
    }

    for i in 0..n {
        let rhs = inst.neighborhood_rhs(i);
        for k in 0..kc {
            let row = g
                .neighbors(i)
                .iter()
                .map(|&j| (y(g.edge_index(i, j).unwrap(), k), 1.0))
                .collect();
            m.add_constraint(format!("nbh_{i}_{k}"), row, RowSense::Le, rhs)?;
        }
    }

    for (e, &(i, j)) in edges.iter().enumerate() {
        for k in 0..kc {
            m.add_constraint(
                format!("ya_{i}_{j}_{k}"),
                vec![(y(e, k), 1.0), (x(i, k), -1.0)],
                RowSense::Le,
                0.0,
            )?;
            m.add_constraint(
                format!("yb_{i}_{j}_{k}"),
                vec![(y(e, k), 1.0), (x(j, k), -1.0)],
                RowSense::Le,
                0.0,
            )?;
            m.add_constraint(
                format!("yc_{i}_{j}_{k}"),
                vec![(y(e, k), 1.0), (x(i, k), -1.0), (x(j, k), -1.0)],
                RowSense::Ge,
                -1.0,
            )?;
        }
    }

    for k in 0..kc {
        let row = (0..n).map(|i| (x(i, k), 1.0)).collect();
        m.add_constraint(
            format!("use_{k}"),
            row,
            RowSense::Le,
            f64::from(inst.usage_limit()[k]),
        )?;
    }

    Ok(m)
}
