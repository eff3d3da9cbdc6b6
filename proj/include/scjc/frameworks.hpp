#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "scjc/ast.hpp"

namespace scjc {

enum class FrameworkKind { SafeletFW, SequencerFW, MissionFW, PEHFW, APEHFW };

std::string to_string(FrameworkKind k);
const std::vector<FrameworkKind>& all_framework_kinds();

/// The parametrised template `id: ID @ begin ... end`.
ProcessPtr framework_template(FrameworkKind k);

/// The template instantiated with the identifier constant `id`.
ProcessPtr make_framework(FrameworkKind k, const std::string& id);

ProcessPtr make_safelet_fw(const std::string& id);
ProcessPtr make_sequencer_fw(const std::string& id);
ProcessPtr make_mission_fw(const std::string& id);
ProcessPtr make_peh_fw(const std::string& id);
ProcessPtr make_apeh_fw(const std::string& id);

/// Channels each framework process communicates on.
std::set<std::string> framework_interface(FrameworkKind k);

/// Declarations of every framework channel, in a fixed order.
const std::vector<ChannelDecl>& framework_channels();

/// Payload sorts of the framework channels.
const std::map<std::string, std::vector<Sort>>& framework_channel_sorts();

/// Names user programs may not define: framework processes and channels,
/// and `Application`.
const std::set<std::string>& reserved_names();

}  // namespace scjc
