#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdmc/matrix.hpp"
#include "sdmc/rational.hpp"
#include "sdmc/rng.hpp"
#include "sdmc/sharing.hpp"

namespace sdmc {

enum class NodeKind { Source, Server, User };

struct NodeId {
    NodeKind kind = NodeKind::User;
    std::size_t index = 0;  // 1-based for sources and servers, 0 for the user

    static NodeId source(std::size_t g) { return {NodeKind::Source, g}; }
    static NodeId server(std::size_t i) { return {NodeKind::Server, i}; }
    static NodeId user() { return {NodeKind::User, 0}; }

    friend bool operator==(const NodeId&, const NodeId&) = default;
    friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

std::string to_string(const NodeId& n);

enum class Phase { Sharing, Computation, Communication, Reconstruction };
std::string_view phase_name(Phase p) noexcept;

struct MessageEntry {
    NodeId from;
    NodeId to;
    std::size_t round = 0;
    Phase phase = Phase::Sharing;
    std::uint64_t symbols = 0;
    std::string tag;
    std::shared_ptr<const MatrixFq> payload;
};

/// Append-only record of every delivered message, in delivery order.
class MessageLog {
public:
    void append(MessageEntry e) { entries_.push_back(std::move(e)); }
    const std::vector<MessageEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<MessageEntry> entries_;
};

/// What a colluding set L of servers received: shares from sources or the user
/// and messages from servers outside L. Messages they sent are excluded.
struct AdversaryView {
    std::set<std::size_t> colluders;
    std::vector<MessageEntry> shares;
    std::vector<MessageEntry> interserver;
};

AdversaryView extract_adversary_view(const MessageLog& log, const std::set<std::size_t>& colluders);

/// Traffic of one inter-server communication round. `object_symbols` is the
/// size of the matrix whose shares were exchanged.
struct InterserverRound {
    std::size_t round = 0;
    std::string label;
    std::uint64_t symbols = 0;
    std::uint64_t object_symbols = 0;
    std::size_t senders = 0;

    Rational per_server() const;
};

struct StragglerInfo {
    std::vector<std::size_t> failed;
    std::size_t group_threshold = 0;
    std::size_t worst_case_threshold = 0;
    std::size_t complete_groups = 0;
    std::vector<std::size_t> groups_used;
};

struct CostReport {
    std::uint64_t upload_symbols = 0;
    std::uint64_t download_symbols = 0;
    std::uint64_t interserver_symbols = 0;
    std::uint64_t input_symbols = 0;
    std::uint64_t output_symbols = 0;
    Rational chi_ul{0};
    Rational chi_dl{0};
    std::size_t computation_rounds = 0;
    std::size_t communication_rounds = 0;
    std::vector<InterserverRound> interserver_rounds;
    std::optional<StragglerInfo> stragglers;

    std::size_t rounds() const noexcept { return computation_rounds + communication_rounds; }
};

nlohmann::json to_json(const CostReport& r);
nlohmann::json to_json(const MessageLog& log, bool with_payloads = false);

/// Synchronous simulated network of Gamma sources, N servers and one user.
///
/// Every transfer goes through `send`, which logs it and charges its symbols
/// to the link class (upload: source/user -> server, download: server -> user,
/// inter-server: server -> server). Failed servers silently drop their
/// reconstruction-phase messages.
class SimNet {
public:
    SimNet(std::size_t gamma, std::size_t n, FieldPtr field, std::uint64_t seed);

    std::size_t gamma() const noexcept { return gamma_; }
    std::size_t n() const noexcept { return n_; }
    std::uint64_t seed() const noexcept { return seed_; }
    const FieldPtr& field_ptr() const noexcept { return field_; }
    const Field& field() const noexcept { return *field_; }

    RngStream& rng(const NodeId& node);

    void inject_stragglers(const std::set<std::size_t>& failed);
    bool is_failed(std::size_t server) const { return failed_.count(server) != 0; }
    const std::set<std::size_t>& failed() const noexcept { return failed_; }

    void begin_computation_round();
    // Opens a communication round; `object_symbols` normalizes its per-server cost.
    void begin_communication_round(std::string label, std::uint64_t object_symbols);

    // Returns false when the message was dropped (straggler).
    bool send(const NodeId& from, const NodeId& to, Phase phase, const std::string& tag, const MatrixFq& payload);

    // Sharing phase: `from` delivers each share to the server it names.
    void scatter(const NodeId& from, const ShareSet& shares);

    // Inter-server exchange: out[i][j] travels from server i+1 to server j+1;
    // the result is indexed [receiver][sender]. Self-messages are not charged.
    std::vector<std::vector<MatrixFq>> exchange(const std::string& tag,
                                                std::vector<std::vector<MatrixFq>> out);

    // Reconstruction phase: each server sends its share to the user; entries
    // of failed servers come back empty.
    std::vector<std::optional<Share>> gather_to_user(const ShareSet& shares);

    // Runs f(i) for servers 1..N; concurrent when parallel execution is enabled.
    // `f` must not call back into the network.
    void for_each_server(const std::function<void(std::size_t)>& f) const;
    void set_parallel(bool on) noexcept { parallel_ = on; }

    void add_input_symbols(std::uint64_t s) { input_symbols_ += s; }
    void add_output_symbols(std::uint64_t s) { output_symbols_ += s; }
    void set_straggler_info(StragglerInfo info) { straggler_ = std::move(info); }

    const MessageLog& log() const noexcept { return log_; }
    CostReport report() const;

private:
    std::size_t gamma_;
    std::size_t n_;
    FieldPtr field_;
    std::uint64_t seed_;
    std::map<NodeId, RngStream> rngs_;
    std::set<std::size_t> failed_;
    bool parallel_ = false;

    MessageLog log_;
    std::uint64_t upload_ = 0, download_ = 0, interserver_ = 0;
    std::uint64_t input_symbols_ = 0, output_symbols_ = 0;
    std::size_t computation_rounds_ = 0, communication_rounds_ = 0;
    std::size_t round_ = 0;
    Phase phase_ = Phase::Sharing;
    std::vector<InterserverRound> rounds_;
    std::optional<StragglerInfo> straggler_;
};

}  // namespace sdmc
