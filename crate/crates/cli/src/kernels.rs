//! Kernel table for the eval-asymptotics scenario.

use ness_core::asymptotics::{q1_vn, q_tilde_vn, q_vn, Q_n, Q_tilde_n};
use ness_core::entanglement::Order;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::Table;

pub const COLUMNS: &[&str] = &["order", "t", "q_single", "q_separated", "q_shared"];

/// Per transmission T: the single-discontinuity kernel Q_n(T), the separated
/// kernel Q̃_n(T) and Q_n(T) + Q_n(R) − (1/n − n)/12 (q1, q̃, q for von Neumann).
pub fn kernel_row(order: Order, t: f64) -> Result<[f64; 3]> {
    Ok(match order {
        Order::Renyi(n) => [Q_n(n, t)?, Q_tilde_n(n, t)?, Q_n(n, t)? + Q_n(n, 1.0 - t)? - (1.0 / n - n) / 12.0],
        Order::VonNeumann => [q1_vn(t)?, q_tilde_vn(t)?, q_vn(t)?],
    })
}

pub fn run_eval_asymptotics(config: &ExperimentConfig) -> Result<Table> {
    let points: Vec<(Order, f64)> =
        config.orders.iter().flat_map(|&o| config.t_grid.iter().map(move |&t| (o, t))).collect();
    let values = points.par_iter().map(|&(o, t)| kernel_row(o, t)).collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(COLUMNS);
    for ((o, t), v) in points.iter().zip(values) {
        table.push(vec![o.label().into(), (*t).into(), v[0].into(), v[1].into(), v[2].into()]);
    }
    Ok(table)
}
