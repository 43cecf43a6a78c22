//! Interned identifiers for sorts, features and variables.
//!
//! The three alphabets are kept apart by distinct newtypes, so the same text
//! may name a feature and a variable at once without clashing. Identifiers are
//! interned process-wide: equality and hashing are pointer based, ordering is
//! by text so that printed output never depends on interning order.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

/// Prefix reserved for generated names. The parser rejects it.
pub const RESERVED_PREFIX: char = '_';

fn interner() -> &'static Mutex<HashSet<Arc<str>>> {
    static INTERNER: OnceLock<Mutex<HashSet<Arc<str>>>> = OnceLock::new();
    INTERNER.get_or_init(|| Mutex::new(HashSet::new()))
}

/// An interned, nonempty identifier text.
#[derive(Clone)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn intern(text: &str) -> Self {
        assert!(!text.is_empty(), "identifiers must be nonempty");
        let mut table = interner().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(existing) = table.get(text) {
            return Symbol(existing.clone());
        }
        let arc: Arc<str> = Arc::from(text);
        table.insert(arc.clone());
        Symbol(arc)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Address of the interned text; stable for the lifetime of the process.
    pub fn handle(&self) -> usize {
        Arc::as_ptr(&self.0) as *const u8 as usize
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.handle().hash(state);
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self == other {
            std::cmp::Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! symbol_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Symbol);

        impl $name {
            pub fn new(text: &str) -> Self {
                $name(Symbol::intern(text))
            }

            pub fn as_str(&self) -> &str {
                self.0.as_str()
            }

            pub fn symbol(&self) -> &Symbol {
                &self.0
            }

            pub fn is_reserved(&self) -> bool {
                self.0.is_reserved()
            }
        }

        impl From<&str> for $name {
            fn from(text: &str) -> Self {
                $name::new(text)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }
    };
}

symbol_newtype!(
    /// A sort symbol (unary predicate). Distinct sorts denote disjoint sets.
    Sort
);
symbol_newtype!(
    /// A feature symbol (binary, functional predicate).
    Feature
);
symbol_newtype!(
    /// A variable.
    Var
);

/// Supply of fresh names.
///
/// Generated names carry the reserved `_` prefix followed by a hint and a
/// counter, so they never collide with parsed identifiers. Names the session
/// has been told about via [`Session::observe`] are skipped as well.
#[derive(Debug, Default, Clone)]
pub struct Session {
    counter: u64,
    seen: BTreeSet<String>,
}

impl Session {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a name so it is never handed out by this session.
    pub fn observe(&mut self, name: &str) {
        if name.starts_with(RESERVED_PREFIX) {
            self.seen.insert(name.to_owned());
        }
    }

    pub fn observe_vars<'a>(&mut self, vars: impl IntoIterator<Item = &'a Var>) {
        for v in vars {
            self.observe(v.as_str());
        }
    }

    fn fresh_name(&mut self, hint: &str) -> String {
        let hint: String = hint
            .trim_start_matches(RESERVED_PREFIX)
            .chars()
            .take_while(|c| c.is_ascii_alphabetic())
            .collect();
        let hint = if hint.is_empty() { "v".to_owned() } else { hint };
        loop {
            self.counter += 1;
            let name = format!("{RESERVED_PREFIX}{hint}{}", self.counter);
            if self.seen.insert(name.clone()) {
                return name;
            }
        }
    }

    pub fn fresh_var(&mut self, hint: &str) -> Var {
        Var::new(&self.fresh_name(hint))
    }

    pub fn fresh_sort(&mut self, hint: &str) -> Sort {
        Sort::new(&self.fresh_name(hint))
    }

    pub fn fresh_feature(&mut self, hint: &str) -> Feature {
        Feature::new(&self.fresh_name(hint))
    }
}
