//! Buildings made of architectural sections, assembled floor by floor, each
//! floor consuming a bill of structural details.
//!
//! A building is assembled by one team over `assembly_duration` months. All
//! of its sections rise together, bottom floor first, at a constant rate of
//! floor-units per month. Month `m` (1-based) covers `[m - 1, m)` on the
//! continuous time axis, so a building's contribution to a month is the
//! slice of its floor sequence climbed during the overlap.
//!
//! Requirements compose linearly:
//! `details(month) = sum over sections s, floors r of progress(s, r) * bill(s, r)`.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::CountVector;
use crate::model::{join_violations, Violation};

/// Day-denominated shifts convert to months at this rate.
pub const DAYS_PER_MONTH: f64 = 30.0;

/// Overlaps shorter than this on one team are ignored.
pub const TIME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum HomeError {
    #[error("invalid home-building model: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown building {0}")]
    UnknownBuilding(String),
    #[error("unknown building type {0}")]
    UnknownBuildingType(String),
    #[error("unknown detail type {0}")]
    UnknownDetail(String),
    #[error("empty month: no detail requirement to share out")]
    EmptyMonth,
    #[error("team {team}: buildings {first} and {second} overlap")]
    Overlap {
        team: String,
        first: String,
        second: String,
    },
}

/// How many floor-units a building climbs over its assembly time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateBasis {
    /// Every floor-unit of the sequence, `U / duration`.
    AllFloors,
    /// All but the terminal floor-unit, `(U - 1) / duration`.
    #[default]
    DropLast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionType {
    pub id: String,
    /// Floor type x detail type, details per floor of one section.
    pub details_per_floor: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingType {
    pub id: String,
    /// Floor-units of each floor type, bottom to top.
    pub floor_counts: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub building_type: String,
    pub sections: BTreeMap<String, u32>,
    /// Months.
    pub assembly_duration: f64,
    /// Planned start in months; the team schedule carries the start used for
    /// computation.
    pub start: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub general_square: Option<f64>,
}

/// Section bills, building templates and the buildings under planning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub floor_types: Vec<String>,
    pub detail_types: Vec<String>,
    pub section_types: Vec<SectionType>,
    pub building_types: Vec<BuildingType>,
    pub buildings: Vec<Building>,
    #[serde(default)]
    pub rate_basis: RateBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub building: String,
    pub start: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Team {
    pub id: String,
    #[serde(default)]
    pub assignments: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamSchedule {
    pub teams: Vec<Team>,
}

/// Floor-units per section type and floor type laid during one month.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyFloorProfile {
    pub month: usize,
    /// Section order of the catalog, floor order of the catalog.
    pub rows: Vec<Vec<f64>>,
}

/// Detail requirements per month, months 1..=k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementTable {
    pub detail_types: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl RequirementTable {
    pub fn months(&self) -> usize {
        self.rows.len()
    }

    pub fn detail_index(&self, id: &str) -> Result<usize, HomeError> {
        self.detail_types
            .iter()
            .position(|d| d == id)
            .ok_or_else(|| HomeError::UnknownDetail(id.to_string()))
    }

    /// Requirement vector of 1-based `month`.
    pub fn month(&self, month: usize) -> CountVector {
        CountVector::new(self.rows[month - 1].clone()).expect("requirements are non-negative")
    }

    pub fn column(&self, detail: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[detail])
    }

    /// Largest requirement of `detail` and the 1-based month it occurs in.
    pub fn peak(&self, detail: usize) -> (usize, f64) {
        self.column(detail)
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                if v > best.1 {
                    (i + 1, v)
                } else {
                    best
                }
            })
    }

    pub fn shares(&self, month: usize) -> Result<Vec<f64>, HomeError> {
        detail_shares(&self.month(month))
    }
}

/// Percentage of each detail type in a month's requirement.
pub fn detail_shares(requirement: &CountVector) -> Result<Vec<f64>, HomeError> {
    let total = requirement.total();
    if total <= 0.0 {
        return Err(HomeError::EmptyMonth);
    }
    Ok(requirement
        .as_slice()
        .iter()
        .map(|v| 100.0 * v / total)
        .collect())
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

impl Catalog {
    pub fn validate(&self) -> Result<(), HomeError> {
        let mut v = Vec::new();
        let floors = self.floor_types.len();
        let details = self.detail_types.len();
        unique(&self.floor_types, "floor type", &mut v);
        unique(&self.detail_types, "detail type", &mut v);
        let section_ids: Vec<String> = self.section_types.iter().map(|s| s.id.clone()).collect();
        unique(&section_ids, "section type", &mut v);
        let type_ids: Vec<String> = self.building_types.iter().map(|t| t.id.clone()).collect();
        unique(&type_ids, "building type", &mut v);
        let building_ids: Vec<String> = self.buildings.iter().map(|b| b.id.clone()).collect();
        unique(&building_ids, "building", &mut v);

        for s in &self.section_types {
            let entity = format!("section type {}", s.id);
            if s.details_per_floor.len() != floors
                || s.details_per_floor.iter().any(|r| r.len() != details)
            {
                v.push(Violation::new(
                    &entity,
                    format!("detail matrix must be {floors}x{details}"),
                ));
            }
            if s.details_per_floor.iter().flatten().any(|x| !(*x >= 0.0)) {
                v.push(Violation::new(&entity, "negative detail count"));
            }
        }
        for t in &self.building_types {
            let entity = format!("building type {}", t.id);
            if t.floor_counts.len() != floors {
                v.push(Violation::new(
                    &entity,
                    format!("needs {floors} floor counts"),
                ));
            }
            if t.floor_counts.iter().sum::<u32>() == 0 {
                v.push(Violation::new(&entity, "has no floors"));
            }
        }
        for b in &self.buildings {
            let entity = format!("building {}", b.id);
            if !type_ids.contains(&b.building_type) {
                v.push(Violation::new(
                    &entity,
                    format!("unknown building type {}", b.building_type),
                ));
            }
            for s in b.sections.keys() {
                if !section_ids.contains(s) {
                    v.push(Violation::new(&entity, format!("unknown section type {s}")));
                }
            }
            if b.sections.values().sum::<u32>() == 0 {
                v.push(Violation::new(&entity, "has no sections"));
            }
            if !(b.assembly_duration > 0.0) {
                v.push(Violation::new(
                    &entity,
                    "assembly duration must be positive",
                ));
            }
            if !(b.start >= 0.0) {
                v.push(Violation::new(&entity, "start must be non-negative"));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(HomeError::Invalid(v))
        }
    }

    pub fn building(&self, id: &str) -> Result<&Building, HomeError> {
        self.buildings
            .iter()
            .find(|b| b.id == id)
            .ok_or_else(|| HomeError::UnknownBuilding(id.to_string()))
    }

    pub fn building_type(&self, id: &str) -> Result<&BuildingType, HomeError> {
        self.building_types
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| HomeError::UnknownBuildingType(id.to_string()))
    }

    /// Non-empty floor types of a building type, bottom to top, with their
    /// unit counts.
    pub fn floor_sequence(&self, building_type: &str) -> Result<Vec<(usize, u32)>, HomeError> {
        Ok(self
            .building_type(building_type)?
            .floor_counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(r, &n)| (r, n))
            .collect())
    }

    fn climbed_units(&self, total_units: u32) -> f64 {
        match self.rate_basis {
            RateBasis::AllFloors => f64::from(total_units),
            RateBasis::DropLast => f64::from(total_units.saturating_sub(1)),
        }
    }

    /// Floor-units of each floor type completed by one section of `building`
    /// during 1-based `month`, when assembly starts at `start`.
    pub fn section_progress(
        &self,
        building: &Building,
        start: f64,
        month: usize,
    ) -> Result<Vec<f64>, HomeError> {
        let seq = self.floor_sequence(&building.building_type)?;
        let units: u32 = seq.iter().map(|(_, n)| n).sum();
        let rate = self.climbed_units(units) / building.assembly_duration;
        let duration = building.assembly_duration;
        let progress = |t: f64| rate * (t - start).clamp(0.0, duration);
        let window = (progress(month as f64 - 1.0), progress(month as f64));

        let mut out = vec![0.0; self.floor_types.len()];
        let mut base = 0.0;
        for (floor, n) in seq {
            let span = (base, base + f64::from(n));
            out[floor] += overlap(window, span);
            base = span.1;
        }
        Ok(out)
    }

    fn section_index(&self, id: &str) -> usize {
        self.section_types
            .iter()
            .position(|s| s.id == id)
            .expect("validated catalog")
    }

    fn add_building_floors(
        &self,
        rows: &mut [Vec<f64>],
        building: &Building,
        start: f64,
        month: usize,
    ) -> Result<(), HomeError> {
        let progress = self.section_progress(building, start, month)?;
        if progress.iter().all(|&p| p == 0.0) {
            return Ok(());
        }
        for (section, &count) in &building.sections {
            let row = &mut rows[self.section_index(section)];
            for (cell, p) in row.iter_mut().zip(&progress) {
                *cell += f64::from(count) * p;
            }
        }
        Ok(())
    }

    /// Floor-units per section type laid by every active building in `month`.
    pub fn monthly_floor_requirements(
        &self,
        schedule: &TeamSchedule,
        month: usize,
    ) -> Result<MonthlyFloorProfile, HomeError> {
        let mut rows = vec![vec![0.0; self.floor_types.len()]; self.section_types.len()];
        for a in schedule.assignments() {
            self.add_building_floors(&mut rows, self.building(&a.building)?, a.start, month)?;
        }
        Ok(MonthlyFloorProfile { month, rows })
    }

    /// Details consumed by a floor profile.
    pub fn details_for(&self, profile: &MonthlyFloorProfile) -> CountVector {
        let mut out = vec![0.0; self.detail_types.len()];
        for (section, row) in self.section_types.iter().zip(&profile.rows) {
            for (units, bill) in row.iter().zip(&section.details_per_floor) {
                if *units == 0.0 {
                    continue;
                }
                for (o, d) in out.iter_mut().zip(bill) {
                    *o += units * d;
                }
            }
        }
        CountVector::new(out).expect("non-negative by construction")
    }

    pub fn monthly_detail_requirements(
        &self,
        schedule: &TeamSchedule,
        month: usize,
    ) -> Result<CountVector, HomeError> {
        Ok(self.details_for(&self.monthly_floor_requirements(schedule, month)?))
    }

    /// Detail requirements for months `1..=months`.
    pub fn horizon_requirement_table(
        &self,
        schedule: &TeamSchedule,
        months: usize,
    ) -> Result<RequirementTable, HomeError> {
        let rows = (1..=months)
            .map(|m| Ok(self.monthly_detail_requirements(schedule, m)?.into_inner()))
            .collect::<Result<Vec<_>, HomeError>>()?;
        Ok(RequirementTable {
            detail_types: self.detail_types.clone(),
            rows,
        })
    }
}

fn unique(ids: &[String], what: &str, out: &mut Vec<Violation>) {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            out.push(Violation::new(format!("{what} {id}"), "duplicate id"));
        }
    }
}

impl TeamSchedule {
    pub fn empty(team_ids: &[&str]) -> Self {
        Self {
            teams: team_ids
                .iter()
                .map(|id| Team {
                    id: id.to_string(),
                    assignments: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn assignments(&self) -> impl Iterator<Item = &Assignment> {
        self.teams.iter().flat_map(|t| &t.assignments)
    }

    /// Team index and start of `building`.
    pub fn locate(&self, building: &str) -> Option<(usize, f64)> {
        self.teams.iter().enumerate().find_map(|(i, t)| {
            t.assignments
                .iter()
                .find(|a| a.building == building)
                .map(|a| (i, a.start))
        })
    }

    /// First pair of overlapping buildings on any team.
    pub fn find_overlap(&self, catalog: &Catalog) -> Result<Option<HomeError>, HomeError> {
        for team in &self.teams {
            let mut spans = Vec::with_capacity(team.assignments.len());
            for a in &team.assignments {
                let b = catalog.building(&a.building)?;
                spans.push((a.start, a.start + b.assembly_duration, a.building.as_str()));
            }
            spans.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.2.cmp(y.2)));
            for w in spans.windows(2) {
                if w[1].0 < w[0].1 - TIME_TOLERANCE {
                    return Ok(Some(HomeError::Overlap {
                        team: team.id.clone(),
                        first: w[0].2.to_string(),
                        second: w[1].2.to_string(),
                    }));
                }
            }
        }
        Ok(None)
    }

    /// Checks team occupancy, single placement of buildings and, when given,
    /// that every building finishes within `horizon` months.
    pub fn validate(&self, catalog: &Catalog, horizon: Option<f64>) -> Result<(), HomeError> {
        let mut v = Vec::new();
        let mut placed = HashSet::new();
        let mut team_ids = HashSet::new();
        for team in &self.teams {
            if !team_ids.insert(&team.id) {
                v.push(Violation::new(format!("team {}", team.id), "duplicate id"));
            }
            for a in &team.assignments {
                let entity = format!("team {} building {}", team.id, a.building);
                let Ok(b) = catalog.building(&a.building) else {
                    v.push(Violation::new(entity, "unknown building"));
                    continue;
                };
                if !placed.insert(&a.building) {
                    v.push(Violation::new(entity.clone(), "placed more than once"));
                }
                if !(a.start >= -TIME_TOLERANCE) {
                    v.push(Violation::new(entity.clone(), "starts before month 0"));
                }
                if let Some(h) = horizon {
                    let end = a.start + b.assembly_duration;
                    if end > h + TIME_TOLERANCE {
                        v.push(Violation::new(
                            entity,
                            format!("ends at {end:.3}, beyond horizon {h}"),
                        ));
                    }
                }
            }
        }
        if v.is_empty() {
            if let Some(err) = self.find_overlap(catalog)? {
                v.push(Violation::new("schedule", err.to_string()));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(HomeError::Invalid(v))
        }
    }

    pub(crate) fn set_start(&mut self, building: &str, team: usize, start: f64) {
        for t in &mut self.teams {
            t.assignments.retain(|a| a.building != building);
        }
        let team = &mut self.teams[team];
        team.assignments.push(Assignment {
            building: building.to_string(),
            start,
        });
        team.assignments.sort_by(|a, b| a.start.total_cmp(&b.start));
    }
}
