//! Exhaustive enumeration for tiny instances.
//!
//! Every set of exactly `m` non-empty ordered stop sequences is generated by
//! inserting assets `1..=n` one at a time into every position of every open
//! sequence, or opening a new one. Candidate costs are computed straight from
//! the coordinates and service times; nothing here shares code with the
//! search-based solvers.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::exact::{SolveResult, SolveStatus};
use crate::model::{evaluate_solution, has_hard_violations, Instance, Method, Solution};

pub const DEFAULT_MAX_N: usize = 9;

struct Geometry {
    points: Vec<(f64, f64)>,
    service: Vec<f64>,
    demand: Vec<f64>,
    speed: f64,
}

impl Geometry {
    fn arc(&self, i: usize, j: usize) -> f64 {
        let (dx, dy) = (self.points[i].0 - self.points[j].0, self.points[i].1 - self.points[j].1);
        (dx * dx + dy * dy).sqrt() / self.speed + self.service[j]
    }

    fn tour(&self, stops: &[usize]) -> f64 {
        let mut prev = 0;
        let mut total = 0.0;
        for &s in stops {
            total += self.arc(prev, s);
            prev = s;
        }
        total + self.arc(prev, 0)
    }
}

struct Search<'a> {
    geo: &'a Geometry,
    n: usize,
    m: usize,
    capacity: f64,
    tours: Vec<Vec<usize>>,
    best: Option<(f64, Vec<Vec<usize>>)>,
    visited: u64,
}

impl Search<'_> {
    fn place(&mut self, asset: usize) {
        if asset > self.n {
            if self.tours.len() == self.m {
                self.consider();
            }
            return;
        }
        // assets still to place must be able to open the missing sequences
        let remaining = self.n - asset + 1;
        if self.tours.len() + remaining < self.m {
            return;
        }
        for t in 0..self.tours.len() {
            for pos in 0..=self.tours[t].len() {
                self.tours[t].insert(pos, asset);
                self.place(asset + 1);
                self.tours[t].remove(pos);
            }
        }
        if self.tours.len() < self.m {
            self.tours.push(vec![asset]);
            self.place(asset + 1);
            self.tours.pop();
        }
    }

    fn consider(&mut self) {
        self.visited += 1;
        let loads_ok = self.tours.iter().all(|t| {
            let load: f64 = t.iter().map(|&s| self.geo.demand[s]).sum();
            load <= self.capacity + 1e-9
        });
        if !loads_ok {
            return;
        }
        let cost: f64 = self.tours.iter().map(|t| self.geo.tour(t)).sum();
        let mut canon = self.tours.clone();
        canon.sort();
        let better = match &self.best {
            None => true,
            Some((best, repr)) => cost < best - 1e-9 || ((cost - best).abs() <= 1e-9 && canon < *repr),
        };
        if better {
            self.best = Some((cost, canon));
        }
    }
}

/// Minimum-cost solution by exhaustive enumeration; refuses `n > max_n`.
///
/// Ties within 1e-9 go to the lexicographically smallest sorted route set.
pub fn solve_bruteforce(instance: &Instance, max_n: usize) -> Result<SolveResult> {
    let start = Instant::now();
    let n = instance.n();
    if n > max_n {
        return Err(Error::TooLarge { n, max_n });
    }
    if n == 0 {
        return Err(Error::EmptyInstance);
    }
    if !(instance.speed > 0.0) {
        return Err(Error::InvalidSpeed(instance.speed));
    }
    let m = instance.drones;
    if m > n {
        return Err(Error::TooManyDrones { m, n });
    }
    let geo = Geometry {
        points: (0..=n).map(|i| instance.location(i)).collect::<Result<_>>()?,
        service: (0..=n).map(|i| instance.service_time(i)).collect::<Result<_>>()?,
        demand: (0..=n).map(|i| instance.demand(i)).collect::<Result<_>>()?,
        speed: instance.speed,
    };
    let mut search = Search {
        geo: &geo,
        n,
        m,
        capacity: instance.capacity,
        tours: Vec::with_capacity(m),
        best: None,
        visited: 0,
    };
    if m >= 1 {
        search.place(1);
    }

    let wall_time = start.elapsed().as_secs_f64();
    let Some((_, tours)) = search.best else {
        return Ok(SolveResult {
            status: SolveStatus::Infeasible,
            incumbent: None,
            lower_bound: f64::INFINITY,
            nodes_explored: search.visited,
            wall_time,
        });
    };
    let costs = crate::model::build_cost_matrix(instance)?;
    let solution = Solution::from_tours(instance, &costs, tours, Method::Brute)?;
    let (total, violations) = evaluate_solution(instance, &solution)?;
    debug_assert!(!has_hard_violations(&violations), "{violations:?}");
    Ok(SolveResult {
        status: SolveStatus::Optimal,
        lower_bound: total,
        incumbent: Some(solution),
        nodes_explored: search.visited,
        wall_time,
    })
}
