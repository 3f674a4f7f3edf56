// The machine M_n used for depth lower bounds: two extra glasses, every
// source command also adds a coin to glass K+1 and needs glass K+2 empty,
// and every command number i gets `Add(K+1,K+2) -> i` and
// `if0(K+1,K+2) -> 0`.

use serde::Serialize;

use crate::machines::{Command, MinskyConfig, MinskyMachine, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Augmented {
    pub machine: MinskyMachine,
    /// Glass count of the source machine.
    pub source_glasses: usize,
    /// Number of leading commands that come from the source.
    pub source_commands: usize,
}

impl Augmented {
    /// 1 for lifted source commands, 0 for the new ones.
    pub fn weight(&self, command: usize) -> usize {
        usize::from(command < self.source_commands)
    }

    pub fn computation_weight(&self, commands: &[usize]) -> usize {
        commands.iter().map(|&c| self.weight(c)).sum()
    }

    /// Forget the two extra glasses.
    pub fn project(&self, c: &MinskyConfig) -> MinskyConfig {
        MinskyConfig { state: c.state, coins: c.coins[..self.source_glasses].to_vec() }
    }

    /// Image of a computation under the projection: the weight-1 commands,
    /// renamed to the source command indices.
    pub fn project_commands(&self, commands: &[usize]) -> Vec<usize> {
        commands.iter().copied().filter(|&c| c < self.source_commands).collect()
    }

    /// Source configuration with glasses K+1, K+2 holding the given coins.
    pub fn lift(&self, c: &MinskyConfig, extra: (u64, u64)) -> MinskyConfig {
        let mut coins = c.coins.clone();
        coins.push(extra.0);
        coins.push(extra.1);
        MinskyConfig { state: c.state, coins }
    }
}

pub fn augment_for_depth(m: &MinskyMachine) -> Result<Augmented> {
    let k = m.glasses;
    let (g1, g2) = (k + 1, k + 2);
    let mut commands: Vec<Command> = m
        .commands
        .iter()
        .map(|c| {
            let mut zero = c.zero.clone();
            zero.push(g2);
            let mut add = c.add.clone();
            add.push(g1);
            Command::new(c.number, &c.sub, &zero, &add, c.target.unwrap_or(0))
        })
        .collect();
    let source_commands = commands.len();
    for i in m.command_numbers().into_iter().filter(|&i| i != 0) {
        commands.push(Command::add(i, &[g1, g2], i));
        commands.push(Command::if_zero(i, &[g1, g2], 0));
    }
    let machine = MinskyMachine::new(k + 2, commands)?;
    Ok(Augmented { machine, source_glasses: k, source_commands })
}
