//! k-party distribution of interpolation queries.
//!
//! The dealer (Bob) routes query `i` of the interpolation protocol to
//! player `i`; the receiver (Eve) reconstructs from all `k` shares. Shares
//! are single-use tokens: delivering or intercepting consumes them, and any
//! interception destroys the session.

pub mod adversary;
pub mod transcript;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::interpolation::{
    run_protocol_analytic, trial_seed, ProtocolParams, ProtocolResult, TransversalTable, DEFAULT_MAX_DOMAIN,
};
use crate::polynomial::{MonomialBasis, Polynomial};

pub use adversary::{AdversaryStructure, PredicateReport};
pub use transcript::{MessageKind, Role, Transcript};

/// Query `(x_i, y_i)` held by player `index` (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Share {
    pub index: usize,
    pub point: Vec<u32>,
    pub y: u32,
    consumed: bool,
}

impl Share {
    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    fn payload(&self) -> Vec<u8> {
        let mut out = (self.index as u64).to_le_bytes().to_vec();
        for v in self.point.iter().chain(std::iter::once(&self.y)) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }
}

/// What one share can reveal classically: the linear constraint
/// `y_i f(x_i) = value` on the coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareView {
    pub index: usize,
    pub point: Vec<u32>,
    pub y: u32,
    pub value: u32,
}

impl ShareView {
    pub fn of(share: &Share, f: &Polynomial) -> Result<Self> {
        let fx = f.evaluate(&share.point)?;
        Ok(Self { index: share.index, point: share.point.clone(), y: share.y, value: f.field().mul(share.y, fx) })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SessionOutcome {
    Reconstructed(ProtocolResult),
    Destroyed,
}

impl SessionOutcome {
    pub fn is_destroyed(&self) -> bool {
        matches!(self, SessionOutcome::Destroyed)
    }

    pub fn succeeded(&self) -> bool {
        matches!(self, SessionOutcome::Reconstructed(r) if r.success)
    }
}

#[derive(Debug, Clone)]
pub struct SessionReport {
    pub transcript: Transcript,
    pub outcome: SessionOutcome,
    /// Constraints learned by the interceptor, one per intercepted share.
    pub interceptor_view: Vec<ShareView>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Pending,
    Delivered,
    Destroyed,
}

/// One dealing session. Confined to a single thread; run independent
/// sessions in parallel instead.
pub struct SharingSession<'a> {
    f: &'a Polynomial,
    params: &'a ProtocolParams,
    table: &'a TransversalTable,
    shares: Vec<Share>,
    routes: Vec<Route>,
    transcript: Transcript,
    interceptor_view: Vec<ShareView>,
}

impl<'a> SharingSession<'a> {
    /// Eve sends the encoded query state; Bob splits one query tuple from
    /// the transversal into `k` shares.
    pub fn deal<R: Rng + ?Sized>(
        f: &'a Polynomial,
        params: &'a ProtocolParams,
        table: &'a TransversalTable,
        rng: &mut R,
    ) -> Result<Self> {
        if f.field() != params.field() || f.basis() != params.basis() {
            return Err(Error::DimensionMismatch { expected: params.dim(), found: f.basis().len() });
        }
        let mut transcript = Transcript::new();
        transcript.record(Role::Eve, Role::Bob, MessageKind::Query, serde_json::to_string(params.field().params())?.as_bytes());

        let entries = table.entries();
        let entry = &entries[rng.gen_range(0..entries.len())];
        let shares: Vec<Share> = entry
            .points
            .iter()
            .zip(&entry.y)
            .enumerate()
            .map(|(i, (point, &y))| Share { index: i + 1, point: point.clone(), y, consumed: false })
            .collect();
        let routes = vec![Route::Pending; shares.len()];
        Ok(Self { f, params, table, shares, routes, transcript, interceptor_view: Vec::new() })
    }

    pub fn k(&self) -> usize {
        self.shares.len()
    }

    pub fn share(&self, index: usize) -> Result<&Share> {
        self.check_index(index)?;
        Ok(&self.shares[index - 1])
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index == 0 || index > self.shares.len() {
            Err(Error::ShareIndexOutOfRange { index, k: self.shares.len() })
        } else {
            Ok(())
        }
    }

    fn consume(&mut self, index: usize) -> Result<&Share> {
        self.check_index(index)?;
        let share = &mut self.shares[index - 1];
        if share.consumed {
            return Err(Error::ShareConsumed(index));
        }
        share.consumed = true;
        Ok(share)
    }

    /// Bob hands share `index` to its player.
    pub fn deliver(&mut self, index: usize) -> Result<()> {
        let payload = self.consume(index)?.payload();
        self.routes[index - 1] = Route::Delivered;
        self.transcript.record(Role::Bob, Role::Player(index), MessageKind::Share, &payload);
        Ok(())
    }

    /// A third party grabs share `index` in transit. The quantum share is
    /// destroyed; the interceptor keeps at most its classical constraint.
    pub fn intercept(&mut self, index: usize) -> Result<ShareView> {
        let share = self.consume(index)?.clone();
        self.routes[index - 1] = Route::Destroyed;
        self.transcript.record(Role::Bob, Role::Player(index), MessageKind::Destroyed, &share.payload());
        let view = ShareView::of(&share, self.f)?;
        self.interceptor_view.push(view.clone());
        Ok(view)
    }

    /// Players forward what they hold to Eve, who decodes if every share
    /// arrived.
    pub fn finish<R: Rng + ?Sized>(mut self, rng: &mut R) -> Result<SessionReport> {
        if let Some(i) = self.routes.iter().position(|&r| r == Route::Pending) {
            return Err(Error::InvalidParams(format!("share {} was never routed", i + 1)));
        }
        for (share, &route) in self.shares.iter().zip(&self.routes) {
            if route == Route::Delivered {
                self.transcript.record(Role::Player(share.index), Role::Eve, MessageKind::Share, &share.payload());
            }
        }
        let outcome = if self.routes.iter().all(|&r| r == Route::Delivered) {
            SessionOutcome::Reconstructed(run_protocol_analytic(self.f, self.params, self.table, rng)?)
        } else {
            SessionOutcome::Destroyed
        };
        let result_payload = match &outcome {
            SessionOutcome::Reconstructed(r) => r.c_hat.iter().flat_map(|v| v.to_le_bytes()).collect(),
            SessionOutcome::Destroyed => b"destroyed".to_vec(),
        };
        self.transcript.record(Role::Eve, Role::Bob, MessageKind::Result, &result_payload);
        Ok(SessionReport { transcript: self.transcript, outcome, interceptor_view: self.interceptor_view })
    }
}

/// Deals `k` shares, lets a third party intercept the listed (1-based)
/// shares and reconstructs when none were taken.
pub fn deal_and_reconstruct<R: Rng + ?Sized>(
    f: &Polynomial,
    params: &ProtocolParams,
    table: &TransversalTable,
    rng: &mut R,
    interception: &[usize],
) -> Result<SessionReport> {
    let k = params.k();
    if let Some(&index) = interception.iter().find(|&&i| i == 0 || i > k) {
        return Err(Error::ShareIndexOutOfRange { index, k });
    }
    let mut session = SharingSession::deal(f, params, table, rng)?;
    for i in 1..=k {
        if interception.contains(&i) {
            session.intercept(i)?;
        } else {
            session.deliver(i)?;
        }
    }
    session.finish(rng)
}

/// Runs `sessions` independent dealings, each with a random secret
/// polynomial and its own stream derived from `seed`. Reports come back in
/// session order.
pub fn run_sessions(
    params: &ProtocolParams,
    table: &TransversalTable,
    sessions: u64,
    seed: u64,
    interception: &[usize],
) -> Result<Vec<SessionReport>> {
    (0..sessions)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, i));
            let f = Polynomial::random_with(params.field().clone(), params.basis().clone(), &mut rng);
            deal_and_reconstruct(&f, params, table, &mut rng, interception)
        })
        .collect()
}

/// Aggregate row for a batch of sharing sessions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionSummary {
    pub p: u32,
    pub r: u32,
    pub n: usize,
    pub d: u32,
    pub k: usize,
    pub intercepted: String,
    pub sessions: u64,
    pub destroyed: u64,
    pub reconstructed: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub p_exact: String,
    pub seed: u64,
}

pub const SESSION_CSV_HEADER: &str =
    "p,r,n,d,k,intercepted,sessions,destroyed,reconstructed,successes,success_rate,p_exact,seed";

impl SessionSummary {
    pub fn new(params: &ProtocolParams, table: &TransversalTable, interception: &[usize], seed: u64, reports: &[SessionReport]) -> Self {
        let count = |pred: fn(&SessionOutcome) -> bool| reports.iter().filter(|r| pred(&r.outcome)).count() as u64;
        let sessions = reports.len() as u64;
        let successes = count(SessionOutcome::succeeded);
        let exact = table.success_probability().exact();
        let mut intercepted: Vec<usize> = interception.to_vec();
        intercepted.sort_unstable();
        intercepted.dedup();
        Self {
            p: params.field().p(),
            r: params.field().r(),
            n: params.n(),
            d: params.basis().d(),
            k: params.k(),
            intercepted: intercepted.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
            sessions,
            destroyed: count(SessionOutcome::is_destroyed),
            reconstructed: count(|o| !o.is_destroyed()),
            successes,
            success_rate: if sessions == 0 { 0.0 } else { successes as f64 / sessions as f64 },
            p_exact: format!("{}/{}", exact.numer(), exact.denom()),
            seed,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.p,
            self.r,
            self.n,
            self.d,
            self.k,
            self.intercepted,
            self.sessions,
            self.destroyed,
            self.reconstructed,
            self.successes,
            self.success_rate,
            self.p_exact,
            self.seed
        )
    }
}

/// Constraint row `y_i (x_i^alpha)_alpha` of each known share.
pub fn constraint_rows(field: &Field, basis: &MonomialBasis, known: &[ShareView]) -> Result<Vec<Vec<u32>>> {
    known
        .iter()
        .map(|s| Ok(basis.monomials(field, &s.point)?.into_iter().map(|m| field.mul(s.y, m)).collect()))
        .collect()
}

/// Number of coefficient vectors consistent with the known shares, by
/// enumeration of all `q^D` candidates.
pub fn ambiguity_count(field: &Field, basis: &MonomialBasis, known: &[ShareView]) -> Result<u128> {
    let dim = basis.len();
    let size = (field.q() as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
    if size > DEFAULT_MAX_DOMAIN as u128 {
        return Err(Error::DomainTooLarge { size, max: DEFAULT_MAX_DOMAIN });
    }
    for s in known {
        field.check(s.y)?;
        field.check(s.value)?;
    }
    let rows = constraint_rows(field, basis, known)?;
    let q = field.q();
    let mut c = vec![0u32; dim];
    let mut count = 0;
    for _ in 0..size {
        if rows.iter().zip(known).all(|(row, s)| field.dot(row, &c) == s.value) {
            count += 1;
        }
        for slot in c.iter_mut() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    Ok(count)
}

/// Rank over `F_q` by Gaussian elimination.
pub fn rank(field: &Field, rows: &[Vec<u32>]) -> usize {
    let mut m: Vec<Vec<u32>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = field.inv(m[rank][col]).expect("pivot is non-zero");
        let pivot_row: Vec<u32> = m[rank].iter().map(|&v| field.mul(v, inv)).collect();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let factor = row[col];
                for (v, &p) in row.iter_mut().zip(&pivot_row) {
                    *v = field.sub(*v, field.mul(factor, p));
                }
            }
        }
        m[rank] = pivot_row;
        rank += 1;
    }
    rank
}
