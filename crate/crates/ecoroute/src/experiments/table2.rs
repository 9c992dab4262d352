//! The two-link comparison of time-, emissions- and fuel-routing.

use std::fmt::Write as _;

use ecoroute_core::{
    solve, EquilibriumResult, LinkCosts, SolverConfig, SystemMetrics, TwoLinkScenario, VehicleClass,
};

use crate::error::Result;
use crate::report::sig9;

/// Tight enough that flows sit well inside the reported rounding.
pub const TABLE2_SOLVER: SolverConfig = SolverConfig {
    epsilon: 1e-7,
    max_iterations: 200_000,
    step_rule: ecoroute_core::StepRule::Msa,
};

#[derive(Debug, Clone)]
pub struct LinkRow {
    pub flow: f64,
    pub costs: LinkCosts,
}

#[derive(Debug, Clone)]
pub struct Table2Row {
    pub class: VehicleClass,
    pub links: [LinkRow; 2],
    pub metrics: SystemMetrics,
    pub result: EquilibriumResult,
}

#[derive(Debug, Clone)]
pub struct Table2 {
    /// Time, emissions and fuel routing, in that order.
    pub rows: Vec<Table2Row>,
}

impl Table2 {
    pub fn row(&self, class: VehicleClass) -> &Table2Row {
        &self.rows[class.index()]
    }

    /// Relative TSE change of `class` routing against time routing.
    pub fn tse_change(&self, class: VehicleClass) -> f64 {
        let base = self.row(VehicleClass::TimeRouting).metrics.tse;
        self.row(class).metrics.tse / base - 1.0
    }

    pub fn tsfc_change(&self, class: VehicleClass) -> f64 {
        let base = self.row(VehicleClass::TimeRouting).metrics.tsfc;
        self.row(class).metrics.tsfc / base - 1.0
    }

    /// Plain-text table: per regime, two link rows and a total row.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} {:>16} {:>18} {:>16} {:>18}",
            "", "Link flow (vph)", "Travel time (min)", "Fuel (kWh)", "Emissions (g CO2)"
        );
        for row in &self.rows {
            let title = match row.class {
                VehicleClass::TimeRouting => "100% time-routing",
                VehicleClass::EmissionsRouting => "100% eco-routing, minimize CO2 emissions",
                VehicleClass::FuelRouting => "100% eco-routing, minimize fuel consumption",
            };
            let _ = writeln!(out, "--- {title} ---");
            for (i, l) in row.links.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{:<8} {:>16} {:>18} {:>16} {:>18}",
                    format!("Link {}", i + 1),
                    sig9(l.flow),
                    sig9(l.costs.travel_time),
                    sig9(l.costs.fuel),
                    sig9(l.costs.emissions)
                );
            }
            let _ = writeln!(
                out,
                "{:<8} {:>16} {:>18} {:>16} {:>18}",
                "Total",
                sig9(row.links[0].flow + row.links[1].flow),
                sig9(row.metrics.tstt),
                sig9(row.metrics.tsfc),
                sig9(row.metrics.tse)
            );
        }
        for class in [VehicleClass::EmissionsRouting, VehicleClass::FuelRouting] {
            let _ = writeln!(
                out,
                "{class} routing vs time routing: TSE {:+.2}%, TSFC {:+.2}%",
                100.0 * self.tse_change(class),
                100.0 * self.tsfc_change(class)
            );
        }
        out
    }
}

/// Solves the demo scenario (link 2: 5 mi at 30 mi/h) under each single
/// routing regime.
pub fn run_table2(config: &SolverConfig) -> Result<Table2> {
    let scenario = TwoLinkScenario::demo();
    let net = scenario.network();
    let model = *net.cost_model();
    let rows = VehicleClass::ALL
        .into_iter()
        .map(|class| {
            let result = solve(&net, &scenario.demand(class), config)?;
            let x = result.state.aggregate();
            let links = [0, 1].map(|i| LinkRow {
                flow: x[i],
                costs: model.link_costs(&net.links()[i], x[i]),
            });
            Ok(Table2Row {
                class,
                links,
                metrics: result.metrics,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table2 { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_in_class_order_and_converged() {
        let t = run_table2(&TABLE2_SOLVER).unwrap();
        for class in VehicleClass::ALL {
            let row = t.row(class);
            assert_eq!(row.class, class);
            assert!(row.result.converged);
            assert!((row.links[0].flow + row.links[1].flow - 4000.0).abs() < 1e-6);
        }
        assert_eq!(t.tse_change(VehicleClass::TimeRouting), 0.0);
    }

    #[test]
    fn render_layout() {
        let text = run_table2(&TABLE2_SOLVER).unwrap().render();
        assert_eq!(text.matches("Link 1").count(), 3);
        assert_eq!(text.matches("Link 2").count(), 3);
        assert_eq!(text.matches("Total").count(), 3);
        assert!(text.contains("minimize CO2 emissions"));
    }
}
