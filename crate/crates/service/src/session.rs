//! In-memory sessions: one staged plan per uploaded grid, evicted by age and count.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hitori_core::staging::StagingPlan;
use parking_lot::Mutex;

use crate::explain::{Explanation, HistoryMode};

pub const DEFAULT_CAPACITY: usize = 64;
pub const DEFAULT_TTL: Duration = Duration::from_secs(60 * 60);

/// Key of a cached explanation: step, history mode, and whether the template was forced.
pub type ExplanationKey = (usize, HistoryMode, bool);

#[derive(Debug, Default)]
pub struct SessionState {
    /// Number of steps revealed so far, in 0..=step count.
    pub cursor: usize,
    pub explanations: HashMap<ExplanationKey, Explanation>,
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub plan: StagingPlan,
    /// Serialized plan document, fixed at creation.
    pub plan_doc: String,
    pub state: tokio::sync::Mutex<SessionState>,
}

struct Slot {
    session: Arc<Session>,
    last_used: Instant,
}

pub struct SessionStore {
    slots: Mutex<HashMap<String, Slot>>,
    capacity: usize,
    ttl: Duration,
}

impl Default for SessionStore {
    fn default() -> Self {
        SessionStore::new(DEFAULT_CAPACITY, DEFAULT_TTL)
    }
}

impl SessionStore {
    pub fn new(capacity: usize, ttl: Duration) -> Self {
        SessionStore {
            slots: Mutex::new(HashMap::new()),
            capacity: capacity.max(1),
            ttl,
        }
    }

    fn sweep(&self, slots: &mut HashMap<String, Slot>, now: Instant) {
        slots.retain(|_, s| now.duration_since(s.last_used) < self.ttl);
    }

    pub fn insert(&self, plan: StagingPlan, plan_doc: String) -> Arc<Session> {
        let session = Arc::new(Session {
            id: uuid::Uuid::new_v4().simple().to_string(),
            plan,
            plan_doc,
            state: tokio::sync::Mutex::new(SessionState::default()),
        });
        let now = Instant::now();
        let mut slots = self.slots.lock();
        self.sweep(&mut slots, now);
        while slots.len() >= self.capacity {
            let oldest = slots
                .iter()
                .min_by_key(|(_, s)| s.last_used)
                .map(|(k, _)| k.clone())
                .expect("store is full, so not empty");
            slots.remove(&oldest);
        }
        slots.insert(
            session.id.clone(),
            Slot {
                session: Arc::clone(&session),
                last_used: now,
            },
        );
        session
    }

    /// The live session with this id, refreshing its age.
    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        let now = Instant::now();
        let mut slots = self.slots.lock();
        self.sweep(&mut slots, now);
        let slot = slots.get_mut(id)?;
        slot.last_used = now;
        Some(Arc::clone(&slot.session))
    }

    pub fn remove(&self, id: &str) -> bool {
        self.slots.lock().remove(id).is_some()
    }

    pub fn len(&self) -> usize {
        let mut slots = self.slots.lock();
        self.sweep(&mut slots, Instant::now());
        slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
