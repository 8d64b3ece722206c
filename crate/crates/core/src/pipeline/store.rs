use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use uuid::Uuid;

pub const DEFAULT_AUDIO_TTL: Duration = Duration::from_secs(15 * 60);

struct Entry {
    bytes: Arc<[u8]>,
    expires: Instant,
}

/// In-memory WAV storage keyed by random ids. Entries vanish once their TTL
/// has passed; expired entries are dropped lazily on access.
pub struct AudioStore {
    ttl: Duration,
    entries: Mutex<HashMap<String, Entry>>,
}

impl Default for AudioStore {
    fn default() -> Self {
        AudioStore::new(DEFAULT_AUDIO_TTL)
    }
}

impl AudioStore {
    pub fn new(ttl: Duration) -> Self {
        AudioStore { ttl, entries: Mutex::new(HashMap::new()) }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn put(&self, bytes: impl Into<Arc<[u8]>>) -> String {
        let id = Uuid::new_v4().simple().to_string();
        let now = Instant::now();
        let mut entries = self.entries.lock().unwrap_or_else(|e| e.into_inner());
        entries.retain(|_, e| e.expires > now);
        entries.insert(id.clone(), Entry { bytes: bytes.into(), expires: now + self.ttl });
        id
    }

    pub fn get(&self, id: &str) -> Option<Arc<[u8]>> {
        let mut entries = self.entries.lock().unwrap_or_else(|e| e.into_inner());
        match entries.get(id) {
            Some(e) if e.expires > Instant::now() => Some(e.bytes.clone()),
            Some(_) => {
                entries.remove(id);
                None
            }
            None => None,
        }
    }

    /// Live entries.
    pub fn len(&self) -> usize {
        let now = Instant::now();
        let entries = self.entries.lock().unwrap_or_else(|e| e.into_inner());
        entries.values().filter(|e| e.expires > now).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
