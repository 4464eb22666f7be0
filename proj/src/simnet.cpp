#include "sdmc/simnet.hpp"

#include <algorithm>
#include <thread>

#include <nlohmann/json.hpp>

#include "sdmc/error.hpp"

namespace sdmc {

std::string to_string(const NodeId& n) {
    switch (n.kind) {
        case NodeKind::Source: return "source" + std::to_string(n.index);
        case NodeKind::Server: return "server" + std::to_string(n.index);
        case NodeKind::User: return "user";
    }
    return "?";
}

std::string_view phase_name(Phase p) noexcept {
    switch (p) {
        case Phase::Sharing: return "sharing";
        case Phase::Computation: return "computation";
        case Phase::Communication: return "communication";
        case Phase::Reconstruction: return "reconstruction";
    }
    return "?";
}

AdversaryView extract_adversary_view(const MessageLog& log, const std::set<std::size_t>& colluders) {
    AdversaryView view;
    view.colluders = colluders;
    for (const auto& e : log.entries()) {
        if (e.to.kind != NodeKind::Server || colluders.count(e.to.index) == 0) continue;
        if (e.from.kind == NodeKind::Server) {
            if (colluders.count(e.from.index) == 0) view.interserver.push_back(e);
        } else {
            view.shares.push_back(e);
        }
    }
    return view;
}

Rational InterserverRound::per_server() const {
    if (senders == 0 || object_symbols == 0) return Rational{0};
    return Rational(static_cast<std::int64_t>(symbols), static_cast<std::int64_t>(senders * object_symbols));
}

SimNet::SimNet(std::size_t gamma, std::size_t n, FieldPtr field, std::uint64_t seed)
    : gamma_(gamma), n_(n), field_(std::move(field)), seed_(seed) {
    require(n >= 1, Errc::invalid_parameters, "network needs at least one server");
    require(field_ != nullptr, Errc::invalid_parameters, "network needs a field");
}

RngStream& SimNet::rng(const NodeId& node) {
    auto it = rngs_.find(node);
    if (it == rngs_.end()) {
        // Stream id: node kind in the top bits, index below.
        const std::uint64_t stream = (static_cast<std::uint64_t>(node.kind) << 48) | node.index;
        it = rngs_.emplace(node, RngStream(seed_, stream)).first;
    }
    return it->second;
}

void SimNet::inject_stragglers(const std::set<std::size_t>& failed) {
    for (std::size_t s : failed)
        require(s >= 1 && s <= n_, Errc::invalid_parameters,
                "straggler id " + std::to_string(s) + " outside 1.." + std::to_string(n_));
    failed_ = failed;
}

void SimNet::begin_computation_round() {
    ++computation_rounds_;
    ++round_;
    phase_ = Phase::Computation;
}

void SimNet::begin_communication_round(std::string label, std::uint64_t object_symbols) {
    ++communication_rounds_;
    ++round_;
    phase_ = Phase::Communication;
    rounds_.push_back(InterserverRound{round_, std::move(label), 0, object_symbols, 0});
}

bool SimNet::send(const NodeId& from, const NodeId& to, Phase phase, const std::string& tag,
                  const MatrixFq& payload) {
    if (from == to) return true;
    if (from.kind == NodeKind::Source)
        require(from.index >= 1 && from.index <= gamma_, Errc::invalid_parameters,
                "source " + std::to_string(from.index) + " outside 1.." + std::to_string(gamma_));
    if (to.kind == NodeKind::Server)
        require(to.index >= 1 && to.index <= n_, Errc::invalid_parameters,
                "server " + std::to_string(to.index) + " outside 1.." + std::to_string(n_));
    if (phase == Phase::Reconstruction && from.kind == NodeKind::Server && is_failed(from.index)) return false;
    if (phase != phase_) {
        if (phase != Phase::Communication) ++round_;
        phase_ = phase;
    }
    const std::uint64_t symbols = payload.size();
    if (from.kind == NodeKind::Server && to.kind == NodeKind::Server) {
        interserver_ += symbols;
        require(!rounds_.empty(), Errc::invalid_parameters, "inter-server message outside a communication round");
        auto& r = rounds_.back();
        r.symbols += symbols;
    } else if (to.kind == NodeKind::Server) {
        upload_ += symbols;
    } else if (from.kind == NodeKind::Server && to.kind == NodeKind::User) {
        download_ += symbols;
    }
    log_.append(MessageEntry{from, to, round_, phase, symbols, tag, std::make_shared<const MatrixFq>(payload)});
    return true;
}

void SimNet::scatter(const NodeId& from, const ShareSet& shares) {
    for (const auto& s : shares) send(from, NodeId::server(s.server_index), Phase::Sharing, s.object_tag, s.payload);
}

std::vector<std::vector<MatrixFq>> SimNet::exchange(const std::string& tag, std::vector<std::vector<MatrixFq>> out) {
    require(out.size() == n_, Errc::length_mismatch, "exchange needs an outbox per server");
    require(!rounds_.empty(), Errc::invalid_parameters, "exchange outside a communication round");
    std::vector<std::vector<MatrixFq>> in(n_, std::vector<MatrixFq>(n_));
    std::size_t senders = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        require(out[i].size() == n_, Errc::length_mismatch, "exchange outbox length must be N");
        bool sent = false;
        for (std::size_t j = 0; j < n_; ++j) {
            send(NodeId::server(i + 1), NodeId::server(j + 1), Phase::Communication, tag, out[i][j]);
            sent = sent || i != j;
            in[j][i] = std::move(out[i][j]);
        }
        if (sent) ++senders;
    }
    rounds_.back().senders = std::max(rounds_.back().senders, senders);
    return in;
}

std::vector<std::optional<Share>> SimNet::gather_to_user(const ShareSet& shares) {
    std::vector<std::optional<Share>> out(shares.size());
    for (std::size_t k = 0; k < shares.size(); ++k) {
        const auto& s = shares[k];
        if (send(NodeId::server(s.server_index), NodeId::user(), Phase::Reconstruction, s.object_tag, s.payload))
            out[k] = s;
    }
    return out;
}

void SimNet::for_each_server(const std::function<void(std::size_t)>& f) const {
    const std::size_t workers = parallel_ ? std::min<std::size_t>(n_, std::max(1u, std::thread::hardware_concurrency())) : 1;
    if (workers <= 1) {
        for (std::size_t i = 1; i <= n_; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w + 1; i <= n_; i += workers) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

CostReport SimNet::report() const {
    CostReport r;
    r.upload_symbols = upload_;
    r.download_symbols = download_;
    r.interserver_symbols = interserver_;
    r.input_symbols = input_symbols_;
    r.output_symbols = output_symbols_;
    if (input_symbols_ != 0)
        r.chi_ul = Rational(static_cast<std::int64_t>(upload_), static_cast<std::int64_t>(input_symbols_));
    if (output_symbols_ != 0)
        r.chi_dl = Rational(static_cast<std::int64_t>(download_), static_cast<std::int64_t>(output_symbols_));
    r.computation_rounds = computation_rounds_;
    r.communication_rounds = communication_rounds_;
    r.interserver_rounds = rounds_;
    r.stragglers = straggler_;
    return r;
}

nlohmann::json to_json(const CostReport& r) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& x : r.interserver_rounds)
        rounds.push_back({{"round", x.round},
                          {"label", x.label},
                          {"symbols", x.symbols},
                          {"object_symbols", x.object_symbols},
                          {"senders", x.senders},
                          {"per_server", to_string(x.per_server())}});
    nlohmann::json j = {{"upload_symbols", r.upload_symbols},
                        {"download_symbols", r.download_symbols},
                        {"interserver_symbols", r.interserver_symbols},
                        {"input_symbols", r.input_symbols},
                        {"output_symbols", r.output_symbols},
                        {"chi_ul", to_string(r.chi_ul)},
                        {"chi_ul_decimal", to_decimal(r.chi_ul)},
                        {"chi_dl", to_string(r.chi_dl)},
                        {"chi_dl_decimal", to_decimal(r.chi_dl)},
                        {"computation_rounds", r.computation_rounds},
                        {"communication_rounds", r.communication_rounds},
                        {"interserver_rounds", rounds}};
    if (r.stragglers) {
        const auto& s = *r.stragglers;
        j["stragglers"] = {{"failed", s.failed},
                           {"group_threshold", s.group_threshold},
                           {"worst_case_threshold", s.worst_case_threshold},
                           {"complete_groups", s.complete_groups},
                           {"groups_used", s.groups_used}};
    }
    return j;
}

nlohmann::json to_json(const MessageLog& log, bool with_payloads) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : log.entries()) {
        nlohmann::json j = {{"from", to_string(e.from)},
                            {"to", to_string(e.to)},
                            {"round", e.round},
                            {"phase", phase_name(e.phase)},
                            {"symbols", e.symbols},
                            {"tag", e.tag}};
        if (with_payloads && e.payload) j["payload"] = matrix_to_json(*e.payload);
        out.push_back(std::move(j));
    }
    return out;
}

}  // namespace sdmc
