use std::collections::HashMap;

/// A field symbol. Ordered by declaration index; the invertibility flag rides
/// along so that unit checks never need the owning [`Context`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    idx: u32,
    invertible: bool,
}

impl Gen {
    pub fn index(self) -> u32 {
        self.idx
    }

    pub fn is_invertible(self) -> bool {
        self.invertible
    }
}

#[derive(Clone, Debug)]
struct GenInfo {
    name: String,
    invertible: bool,
}

/// Declared generators, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Context {
    gens: Vec<GenInfo>,
    by_name: HashMap<String, u32>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `name`, or returns the existing generator of that name.
    ///
    /// Redeclaring with a different invertibility flag keeps the first one.
    pub fn declare(&mut self, name: &str, invertible: bool) -> Gen {
        if let Some(&idx) = self.by_name.get(name) {
            return Gen {
                idx,
                invertible: self.gens[idx as usize].invertible,
            };
        }
        let idx = self.gens.len() as u32;
        self.gens.push(GenInfo {
            name: name.to_string(),
            invertible,
        });
        self.by_name.insert(name.to_string(), idx);
        Gen { idx, invertible }
    }

    pub fn var(&mut self, name: &str) -> Gen {
        self.declare(name, false)
    }

    pub fn lookup(&self, name: &str) -> Option<Gen> {
        self.by_name.get(name).map(|&idx| Gen {
            idx,
            invertible: self.gens[idx as usize].invertible,
        })
    }

    pub fn name(&self, g: Gen) -> &str {
        &self.gens[g.idx as usize].name
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> + '_ {
        self.gens.iter().enumerate().map(|(i, g)| Gen {
            idx: i as u32,
            invertible: g.invertible,
        })
    }
}
