//! Plain-text document formats: JSON run configs and catalogs, CSV traces
//! and histograms. Everything is deterministic and diffable.

use serde::{Deserialize, Serialize};

use crate::container::{Configuration, Container, ContainerKind, ConstraintSet, Wall};
use crate::error::{Error, Result};
use crate::multistart::{Catalog, CampaignParams};
use crate::optimizer::{IterationTrace, OptimizerParams};
use crate::verify::{self, ContactGraph};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainerSpec {
    pub kind: String,
    pub d: usize,
    #[serde(default)]
    pub walls: Option<Vec<Vec<f64>>>,
}

impl ContainerSpec {
    pub fn build(&self) -> Result<Container> {
        match self.kind.as_str() {
            "cube" => Container::cube(self.d),
            "triangle2" => {
                if self.d != 2 {
                    return Err(Error::InvalidArgument("triangle2 requires d = 2".into()));
                }
                Ok(Container::triangle2())
            }
            "polytope" => {
                let rows = self
                    .walls
                    .as_ref()
                    .ok_or_else(|| Error::MalformedInput("polytope requires walls".into()))?;
                let mut walls = Vec::with_capacity(rows.len());
                for row in rows {
                    if row.len() != self.d + 1 {
                        return Err(Error::MalformedInput(format!(
                            "wall row needs {} entries",
                            self.d + 1
                        )));
                    }
                    walls.push(Wall::new(row[..self.d].to_vec(), row[self.d])?);
                }
                Container::polytope(self.d, walls)
            }
            other => Err(Error::MalformedInput(format!("unknown container kind `{other}`"))),
        }
    }

    pub fn of(container: &Container) -> Self {
        let kind = match container.kind() {
            ContainerKind::Cube => "cube",
            ContainerKind::PresetTriangle => "triangle2",
            ContainerKind::Polytope => "polytope",
        };
        let walls = (container.kind() == ContainerKind::Polytope).then(|| {
            container
                .walls()
                .iter()
                .map(|w| {
                    let mut row = w.normal.clone();
                    row.push(w.offset);
                    row
                })
                .collect()
        });
        Self {
            kind: kind.into(),
            d: container.d(),
            walls,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    #[serde(default)]
    pub epsilon0: Option<f64>,
    #[serde(default)]
    pub epsilon_max: Option<f64>,
    #[serde(default)]
    pub residual_threshold: Option<f64>,
    #[serde(default)]
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub bracket_width_tol: Option<f64>,
    #[serde(default)]
    pub stall_limit: Option<usize>,
    #[serde(default)]
    pub perturb_sigma: Option<f64>,
}

impl OptimizerSpec {
    pub fn build(&self, seed: u64) -> OptimizerParams {
        let def = OptimizerParams::default();
        OptimizerParams {
            epsilon0: self.epsilon0.unwrap_or(def.epsilon0),
            epsilon_max: self.epsilon_max.unwrap_or(def.epsilon_max),
            residual_threshold: self.residual_threshold.unwrap_or(def.residual_threshold),
            max_iterations: self.max_iterations.unwrap_or(def.max_iterations),
            bracket_width_tol: self.bracket_width_tol.unwrap_or(def.bracket_width_tol),
            stall_limit: self.stall_limit.unwrap_or(def.stall_limit),
            perturb_sigma: self.perturb_sigma.unwrap_or(def.perturb_sigma),
            rng_seed: seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub match_radius_tol: Option<f64>,
    #[serde(default)]
    pub match_distance_tol: Option<f64>,
    #[serde(default)]
    pub histogram_bin_width: Option<f64>,
    #[serde(default)]
    pub workers: Option<usize>,
}

/// Top-level run configuration; unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigDocument {
    pub container: ContainerSpec,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub optimizer: OptimizerSpec,
    #[serde(default)]
    pub campaign: CampaignSpec,
    #[serde(default)]
    pub start: Option<String>,
    #[serde(default)]
    pub out: Option<String>,
}

impl RunConfigDocument {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn constraint_set(&self) -> Result<ConstraintSet> {
        ConstraintSet::for_container(self.n, self.container.build()?)
    }

    pub fn campaign_params(&self) -> CampaignParams {
        let def = CampaignParams::default();
        CampaignParams {
            restarts: self.campaign.restarts.unwrap_or(def.restarts),
            optimizer: self.optimizer.build(self.seed),
            match_radius_tol: self.campaign.match_radius_tol.unwrap_or(def.match_radius_tol),
            match_distance_tol: self.campaign.match_distance_tol,
            symmetry: None,
            master_seed: self.seed,
            histogram_bin_width: self
                .campaign
                .histogram_bin_width
                .unwrap_or(def.histogram_bin_width),
            workers: self.campaign.workers.unwrap_or(1),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ContactGraphDoc {
    /// 0-based sphere pairs.
    pub pairs: Vec<(usize, usize)>,
    /// 0-based (sphere, wall index) incidences.
    pub walls: Vec<(usize, usize)>,
}

impl ContactGraphDoc {
    pub fn of(graph: &ContactGraph) -> Self {
        Self {
            pairs: graph.pair_edges.clone(),
            walls: graph.wall_incidences.clone(),
        }
    }

    pub fn to_graph(&self, tolerance: f64) -> ContactGraph {
        ContactGraph {
            pair_edges: self.pairs.clone(),
            wall_incidences: self.walls.clone(),
            tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CatalogEntryDoc {
    pub radius: f64,
    pub packing_fraction: Option<f64>,
    pub coordinates: Vec<f64>,
    pub active_count: usize,
    pub contact_graph: ContactGraphDoc,
    pub hit_count: usize,
    pub refined_radius: Option<f64>,
    pub refinement_residual: Option<f64>,
    pub fully_jammed: Option<bool>,
    pub rattlers: Vec<usize>,
    pub polynomial_match: Option<String>,
    pub verify_error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CatalogDocument {
    pub n: usize,
    pub d: usize,
    pub container: String,
    pub seed: u64,
    pub restarts: usize,
    pub failures: usize,
    pub tool_version: String,
    pub entries: Vec<CatalogEntryDoc>,
}

impl CatalogDocument {
    pub fn from_catalog(catalog: &Catalog, cs: &ConstraintSet, seed: u64) -> Self {
        let entries = catalog
            .entries
            .iter()
            .map(|e| {
                let graph = verify::contact_graph(
                    cs,
                    &e.record.configuration,
                    e.record.radius,
                    verify::DEFAULT_CONTACT_TOL,
                );
                CatalogEntryDoc {
                    radius: e.record.radius,
                    packing_fraction: e.packing_fraction,
                    coordinates: e.record.configuration.coords().to_vec(),
                    active_count: e.record.active.len(),
                    contact_graph: ContactGraphDoc::of(&graph),
                    hit_count: e.hits,
                    refined_radius: None,
                    refinement_residual: None,
                    fully_jammed: None,
                    rattlers: Vec::new(),
                    polynomial_match: None,
                    verify_error: None,
                }
            })
            .collect();
        Self {
            n: catalog.n,
            d: catalog.d,
            container: catalog.container_id.clone(),
            seed,
            restarts: catalog.total_runs,
            failures: catalog.failures,
            tool_version: TOOL_VERSION.into(),
            entries,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("catalog serializes");
        s.push('\n');
        s
    }

    pub fn container_of(&self) -> Result<Container> {
        if let Some(d) = self.container.strip_prefix("cube-") {
            let d: usize = d
                .parse()
                .map_err(|_| Error::MalformedInput("bad container id".into()))?;
            Container::cube(d)
        } else if self.container == "triangle2" {
            Ok(Container::triangle2())
        } else {
            Err(Error::MalformedInput(format!(
                "cannot reconstruct container `{}` from id alone",
                self.container
            )))
        }
    }

    /// Refine, certify and polynomial-match every entry in place. Per-entry
    /// failures are recorded in the entry, never propagated.
    pub fn annotate(&mut self, cs: &ConstraintSet) {
        let tables = verify::builtin_polynomials();
        let is_cube = cs.container().kind() == ContainerKind::Cube;
        for entry in &mut self.entries {
            let x = match Configuration::new(self.n, self.d, entry.coordinates.clone()) {
                Ok(x) => x,
                Err(e) => {
                    entry.verify_error = Some(e.to_string());
                    continue;
                }
            };
            let graph = entry.contact_graph.to_graph(verify::DEFAULT_CONTACT_TOL);
            match verify::refine(cs, &x, &graph) {
                Ok(refined) => {
                    entry.refined_radius = Some(refined.radius);
                    entry.refinement_residual = Some(refined.residual);
                    if is_cube {
                        entry.packing_fraction = Some(crate::multistart::packing_fraction(
                            self.n,
                            self.d,
                            refined.radius,
                        ));
                    }
                    match verify::connelly_test(cs, &refined.configuration, &graph) {
                        Ok(verdict) => {
                            entry.fully_jammed = Some(verdict.fully_jammed);
                            entry.rattlers = verdict.rattlers.into_iter().collect();
                        }
                        Err(e) => entry.verify_error = Some(e.to_string()),
                    }
                    entry.polynomial_match = (is_cube)
                        .then(|| {
                            verify::match_reference(refined.radius, self.n, self.d, &tables)
                                .map(|(label, _)| label)
                        })
                        .flatten();
                }
                Err(e) => {
                    entry.verify_error = Some(e.to_string());
                }
            }
        }
    }
}

pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::from("iter,g_value,active_count,residual_sq,step,event\n");
    for row in trace {
        out.push_str(&format!(
            "{},{:.17e},{},{:.17e},{:.17e},{}\n",
            row.iter,
            row.g_value,
            row.active_count,
            row.residual_sq,
            row.step,
            row.event.as_str()
        ));
    }
    out
}

pub fn histogram_csv(histogram: &[(f64, f64)]) -> String {
    let mut out = String::from("radius_bin,frequency\n");
    for (bin, freq) in histogram {
        out.push_str(&format!("{bin:.6},{freq:.17e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multistart::{self, CampaignParams};

    #[test]
    fn run_config_defaults_and_unknown_keys() {
        let doc = RunConfigDocument::parse(
            r#"{"container": {"kind": "cube", "d": 2}, "n": 3}"#,
        )
        .unwrap();
        assert_eq!(doc.seed, 0);
        assert_eq!(doc.campaign_params().restarts, 10_000);

        let bad = RunConfigDocument::parse(
            r#"{"container": {"kind": "cube", "d": 2}, "n": 3, "bogus": 1}"#,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn catalog_round_trip_is_byte_identical() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let params = CampaignParams {
            restarts: 10,
            master_seed: 4,
            ..CampaignParams::default()
        };
        let out = multistart::run_campaign(&cs, &params).unwrap();
        let mut doc = CatalogDocument::from_catalog(&out.catalog, &cs, 4);
        doc.annotate(&cs);
        let text1 = doc.render();
        let doc2 = CatalogDocument::parse(&text1).unwrap();
        let text2 = doc2.render();
        assert_eq!(text1, text2);
    }

    #[test]
    fn trace_csv_shape() {
        let cs = ConstraintSet::cube(2, 2).unwrap();
        let x0 = Configuration::new(2, 2, vec![0.3, 0.4, 0.6, 0.7]).unwrap();
        let rec = crate::optimizer::maximize(&cs, &x0, &Default::default()).unwrap();
        let csv = trace_csv(&rec.trace);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "iter,g_value,active_count,residual_sq,step,event"
        );
        assert!(csv.lines().count() > 1);
    }
}
