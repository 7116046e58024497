// Expected payoffs under private preferences, computed a second way: a
// recursive walk over the game tree that draws types one agent at a time,
// then the committee one member at a time, and plays the truthful replies.

use num_rational::Ratio;

use majority_mechanisms::agent::AgentId;
use majority_mechanisms::bayes::{expected_vote_payoff, BeliefModel, TypeStrategy};
use majority_mechanisms::model::{Alternative, Lottery};

type Q = Ratio<i128>;

fn confirmation_walk(types: &[Alternative], votes: &[Alternative], remaining: &[usize], left: usize) -> Q {
    let n = votes.len();
    let a_votes = votes.iter().filter(|&&v| v == Alternative::A).count();
    let winner = if 2 * a_votes > n { Alternative::A } else { Alternative::B };
    let winner_pa = if winner == Alternative::A { Q::from_integer(1) } else { Q::from_integer(0) };
    if left == 0 {
        return Q::new(a_votes as i128, n as i128);
    }
    let weight = Q::new(1, remaining.len() as i128);
    remaining
        .iter()
        .map(|&speaker| {
            if types[speaker] == winner {
                weight * winner_pa
            } else {
                let rest: Vec<usize> = remaining.iter().copied().filter(|&j| j != speaker).collect();
                weight * confirmation_walk(types, votes, &rest, left - 1)
            }
        })
        .sum()
}

fn type_walk(q: Q, n: usize, agent: usize, own: Alternative, vote: Alternative, types: &mut Vec<Alternative>) -> Q {
    if types.len() == n {
        let votes: Vec<Alternative> = (0..n).map(|j| if j == agent { vote } else { types[j] }).collect();
        let everyone: Vec<usize> = (0..n).collect();
        return confirmation_walk(types, &votes, &everyone, n / 2 + 1);
    }
    if types.len() == agent {
        types.push(own);
        let v = type_walk(q, n, agent, own, vote, types);
        types.pop();
        return v;
    }
    let mut total = Q::from_integer(0);
    for (t, w) in [(Alternative::A, q), (Alternative::B, Q::from_integer(1) - q)] {
        types.push(t);
        total += w * type_walk(q, n, agent, own, vote, types);
        types.pop();
    }
    total
}

#[test]
fn tree_walk_matches_realization_sum() {
    for n in [3, 5, 7] {
        for (num, den) in [(3, 10), (1, 2), (7, 10), (1, 20)] {
            let beliefs = BeliefModel::from_ratio(num, den).unwrap();
            let strategies = vec![TypeStrategy::TRUTHFUL; n];
            for agent in [0, n / 2, n - 1] {
                for own in Alternative::BOTH {
                    for vote in Alternative::BOTH {
                        let walk = type_walk(Q::new(num, den), n, agent, own, vote, &mut Vec::new());
                        let sum =
                            expected_vote_payoff(AgentId::from_index(agent), own, vote, &strategies, &beliefs).unwrap();
                        assert_eq!(sum, Lottery::new(walk).unwrap(), "n={n} q={num}/{den} agent={agent} {own} {vote}");
                    }
                }
            }
        }
    }
}

#[test]
fn frozen_values() {
    // [type a vote a, type a vote b, type b vote a, type b vote b]
    let table: [(usize, (i128, i128), [(i128, i128); 4]); 6] = [
        (3, (3, 10), [(51, 100), (41, 300), (139, 300), (9, 100)]),
        (3, (1, 2), [(3, 4), (11, 36), (25, 36), (1, 4)]),
        (3, (7, 10), [(91, 100), (161, 300), (259, 300), (49, 100)]),
        (5, (3, 10), [(3483, 10000), (23571, 250000), (84429, 250000), (837, 10000)]),
        (5, (1, 2), [(11, 16), (131, 400), (269, 400), (5, 16)]),
        (5, (7, 10), [(9163, 10000), (165571, 250000), (226429, 250000), (6517, 10000)]),
    ];
    for (n, (num, den), values) in table {
        let beliefs = BeliefModel::from_ratio(num, den).unwrap();
        let strategies = vec![TypeStrategy::TRUTHFUL; n];
        let cases = [
            (Alternative::A, Alternative::A),
            (Alternative::A, Alternative::B),
            (Alternative::B, Alternative::A),
            (Alternative::B, Alternative::B),
        ];
        for ((own, vote), (vn, vd)) in cases.into_iter().zip(values) {
            let got = expected_vote_payoff(AgentId::new(1), own, vote, &strategies, &beliefs).unwrap();
            assert_eq!(got, Lottery::from_ratio(vn, vd).unwrap(), "n={n} q={num}/{den} {own} {vote}");
        }
    }
}
