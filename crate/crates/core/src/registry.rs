//! Name-keyed registries of interchangeable algorithm implementations.

use crate::{Error, Result};

type Constructor<T> = fn() -> Box<T>;

/// A list of named constructors for one family of trait objects.
///
/// Lookups are by exact name; the first registered entry is the default.
pub struct Registry<T: ?Sized + 'static> {
    kind: &'static str,
    entries: Vec<(&'static str, Constructor<T>)>,
}

impl<T: ?Sized + 'static> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    pub fn with(mut self, name: &'static str, ctor: Constructor<T>) -> Self {
        self.register(name, ctor);
        self
    }

    /// Adds or replaces an entry.
    pub fn register(&mut self, name: &'static str, ctor: Constructor<T>) {
        if let Some(slot) = self.entries.iter_mut().find(|(n, _)| *n == name) {
            slot.1 = ctor;
        } else {
            self.entries.push((name, ctor));
        }
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn create(&self, name: &str) -> Result<Box<T>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, ctor)| ctor())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn default_name(&self) -> Option<&'static str> {
        self.entries.first().map(|(n, _)| *n)
    }
}
