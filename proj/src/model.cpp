// Apache License, Version 2.0, refer to LICENSE.txt
#include "radp/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "radp/errors.hpp"

namespace radp {

RobustMdp make_mdp(long num_states, long num_terminals, long num_actions, prec_t discount) {
    RobustMdp m;
    m.num_states = num_states;
    m.num_terminals = num_terminals;
    m.num_actions = num_actions;
    m.discount = discount;
    m.reward.assign(num_states, numvec(num_actions, 0.0));
    m.terminal_reward.assign(num_terminals, 0.0);
    m.uncertainty.assign(num_states, {});
    return m;
}

std::string Violation::describe() const {
    std::ostringstream out;
    if (state >= 0) {
        out << "(x=" << state;
        if (action >= 0) out << ", u=" << action;
        out << ") ";
    }
    out << rule;
    return out.str();
}

std::vector<Violation> validate(const RobustMdp& model) {
    std::vector<Violation> out;
    const long dim = model.outcome_dim();

    if (model.num_states <= 0)
        out.push_back({-1, -1, "model must have at least one non-terminal state"});
    if (model.num_actions <= 0) out.push_back({-1, -1, "model must have at least one action"});
    if (!(model.discount > 0.0) || model.discount > 1.0)
        out.push_back({-1, -1, "discount must lie in (0, 1]"});
    if (model.discount >= 1.0 && model.num_terminals == 0)
        out.push_back({-1, -1, "discount 1 requires terminal states and a proper policy"});

    for (long z = 0; z < static_cast<long>(model.terminal_reward.size()); z++)
        if (model.terminal_reward[z] != 0.0)
            out.push_back({-1, -1, "terminal reward nonzero at terminal " + std::to_string(z)});

    if (static_cast<long>(model.reward.size()) != model.num_states)
        out.push_back({-1, -1, "reward table has wrong number of states"});
    if (static_cast<long>(model.uncertainty.size()) != model.num_states)
        out.push_back({-1, -1, "uncertainty table has wrong number of states"});

    for (long x = 0; x < static_cast<long>(model.reward.size()); x++) {
        if (static_cast<long>(model.reward[x].size()) != model.num_actions) {
            out.push_back({x, -1, "reward row has wrong number of actions"});
            continue;
        }
        for (long u = 0; u < model.num_actions; u++)
            if (!std::isfinite(model.reward[x][u]))
                out.push_back({x, u, "reward is not finite"});
    }

    for (long x = 0; x < static_cast<long>(model.uncertainty.size()); x++) {
        if (static_cast<long>(model.uncertainty[x].size()) != model.num_actions) {
            out.push_back({x, -1, "uncertainty row has wrong number of actions"});
            continue;
        }
        for (long u = 0; u < model.num_actions; u++) {
            const UncertaintySet& set = model.uncertainty[x][u];
            if (set.dim() != dim) {
                out.push_back({x, u, "uncertainty set has wrong outcome dimension"});
                continue;
            }
            for (const std::string& rule : set.invariant_violations()) out.push_back({x, u, rule});
        }
    }
    return out;
}

void validate_or_throw(const RobustMdp& model) {
    const std::vector<Violation> violations = validate(model);
    if (violations.empty()) return;
    std::ostringstream out;
    out << "invalid model:";
    for (const Violation& v : violations) out << "\n  " << v.describe();
    throw ValidationError(out.str());
}

namespace {

/// Midpoint of the box pulled back into { sum = 1 } without leaving the
/// bounds: leftover mass is spread proportionally to the remaining slack.
numvec box_midpoint_member(const UncertaintySet& set) {
    const numvec& lo = set.lower();
    const numvec& hi = set.upper();
    const long n = set.dim();
    numvec p(n);
    prec_t total = 0.0;
    for (long i = 0; i < n; i++) {
        p[i] = 0.5 * (lo[i] + hi[i]);
        total += p[i];
    }
    if (total < 1.0) {
        prec_t room = 0.0;
        for (long i = 0; i < n; i++) room += hi[i] - p[i];
        if (room <= 0.0) throw ValidationError("nominal_of: infeasible interval box");
        const prec_t scale = (1.0 - total) / room;
        for (long i = 0; i < n; i++) p[i] += scale * (hi[i] - p[i]);
    } else if (total > 1.0) {
        prec_t room = 0.0;
        for (long i = 0; i < n; i++) room += p[i] - lo[i];
        if (room <= 0.0) throw ValidationError("nominal_of: infeasible interval box");
        const prec_t scale = (total - 1.0) / room;
        for (long i = 0; i < n; i++) p[i] -= scale * (p[i] - lo[i]);
    }
    return p;
}

}  // namespace

NominalSelector NominalSelector::defaults() {
    NominalSelector s;
    s.for_singleton = [](const UncertaintySet& set) { return set.point(); };
    s.for_box = box_midpoint_member;
    s.for_vertices = [](const UncertaintySet& set) { return set.vertices().front(); };
    return s;
}

std::vector<std::vector<numvec>> nominal_of(const RobustMdp& model, const NominalSelector& selector) {
    std::vector<std::vector<numvec>> table(model.num_states);
    for (long x = 0; x < model.num_states; x++) {
        table[x].reserve(model.num_actions);
        for (long u = 0; u < model.num_actions; u++) {
            const UncertaintySet& set = model.uncertainty[x][u];
            const std::function<numvec(const UncertaintySet&)>* fn = nullptr;
            switch (set.kind()) {
            case SetKind::singleton: fn = &selector.for_singleton; break;
            case SetKind::interval_box: fn = &selector.for_box; break;
            case SetKind::vertex_list: fn = &selector.for_vertices; break;
            }
            if (!fn || !*fn)
                throw ValidationError(std::string("nominal_of: selector undefined for variant ") +
                                      to_string(set.kind()));
            table[x].push_back((*fn)(set));
        }
    }
    return table;
}

numvec padded_outcome_values(const RobustMdp& model, const numvec& values) {
    numvec padded(model.outcome_dim(), 0.0);
    for (long x = 0; x < model.num_states; x++) padded[x] = values[x];
    return padded;
}

}  // namespace radp
