#include <gtest/gtest.h>

#include <springcurl/service/live_session.hpp>
#include <springcurl/simulation.hpp>

using namespace springcurl;
using namespace springcurl::service;

namespace {

session_io::SessionManifest human_manifest() {
  CohortConfig cfg;
  cfg.participants = 1;
  cfg.seed = 3;
  auto m = make_cohort(cfg).front();
  m.subject.reset();
  return m;
}

struct Rig {
  std::vector<session_io::SessionEvent> log;
  LiveSession live{human_manifest(), [this](const session_io::SessionEvent& e) { log.push_back(e); }};

  std::optional<std::string> as_experimenter(ClientMessage m) { return live.handle(m, Role::Experimenter); }
  std::optional<std::string> as_participant(ClientMessage m) { return live.handle(m, Role::Participant); }

  std::vector<json> all_messages() {
    std::vector<json> out;
    for (auto& o : live.drain()) {
      if (o.audience == Outgoing::Audience::All) out.push_back(std::move(o.body));
    }
    return out;
  }

  /// Starts the session and enters the first baseline trial.
  void start() {
    live.set_participant_connected(true);
    ASSERT_FALSE(as_experimenter(msg::Advance{}));
    ASSERT_TRUE(live.session()->at_prompt());
    ASSERT_FALSE(as_experimenter(msg::Advance{}));
    ASSERT_TRUE(live.session()->shot_active());
  }

  void grab() {
    as_participant(msg::ButtonDown{});
    live.step();
  }

  std::optional<json> run_until_result(int limit) {
    for (int i = 0; i < limit; ++i) {
      live.step();
      for (auto& m : all_messages()) {
        if (m["type"] == "shot_result") return m;
      }
    }
    return std::nullopt;
  }

  template <class T>
  int count() const {
    int n = 0;
    for (const auto& e : log) n += std::holds_alternative<T>(e.body) ? 1 : 0;
    return n;
  }
};

}  // namespace

TEST(LiveSession, StartsOnExperimenterAdvanceOnly) {
  Rig rig;
  EXPECT_EQ(rig.live.snapshot()["state"], "not_started");
  EXPECT_EQ(rig.as_participant(msg::Advance{}), "experimenter role required");
  EXPECT_EQ(rig.as_participant(msg::ButtonDown{}), "session not started");
  EXPECT_FALSE(rig.as_experimenter(msg::Advance{}));
  EXPECT_EQ(rig.count<session_io::ev::SessionStarted>(), 1);
  const auto msgs = rig.all_messages();
  ASSERT_FALSE(msgs.empty());
  EXPECT_EQ(msgs.back()["type"], "prompt");
  EXPECT_EQ(msgs.back()["kind"], "phase");
  EXPECT_EQ(rig.live.snapshot()["state"], "prompt");
  EXPECT_EQ(rig.as_experimenter(msg::Move{3.0}), "only the participant moves the cursor");
}

TEST(LiveSession, EventsGoToExperimentersOnly) {
  Rig rig;
  rig.as_experimenter(msg::Advance{});
  int events = 0;
  for (const auto& o : rig.live.drain()) {
    if (o.body["type"] == "event") {
      ++events;
      EXPECT_EQ(o.audience, Outgoing::Audience::Experimenters);
    }
  }
  EXPECT_EQ(events, 1);
}

TEST(LiveSession, FullShotMatchesHeadlessPhysics) {
  Rig rig;
  rig.start();
  EXPECT_EQ(rig.count<session_io::ev::PhaseEntered>(), 1);
  EXPECT_EQ(rig.as_experimenter(msg::Advance{}), "no prompt to advance");
  rig.all_messages();

  rig.grab();
  ASSERT_EQ(rig.live.session()->shot_state().phase, ShotPhase::Grabbed);
  auto snap = rig.live.snapshot();
  EXPECT_FALSE(snap["cube_visible"].get<bool>());
  EXPECT_FALSE(snap["sphere_visible"].get<bool>());
  EXPECT_TRUE(snap["cube_mm"].is_null());
  EXPECT_TRUE(snap["sphere_mm"].is_null());

  rig.as_participant(msg::Move{-90.0});
  for (int i = 0; i < 100; ++i) rig.live.step();
  EXPECT_NEAR(rig.live.session()->effector().position_mm, -90.0, 1e-9);
  EXPECT_NEAR(rig.live.snapshot()["force_n"].get<double>(), 10.0, 1e-9);

  rig.as_participant(msg::ButtonUp{});
  const auto result = rig.run_until_result(10);
  ASSERT_TRUE(result);
  const auto& m = rig.live.manifest();
  EXPECT_NEAR((*result)["force_n"].get<double>(), 10.0, 1e-9);
  EXPECT_NEAR((*result)["landing"].get<double>(), travel_distance(m.physics, 10.0), 1e-9);
  EXPECT_NEAR((*result)["landing"].get<double>(), 500.0, 1e-9);
  EXPECT_EQ((*result)["points"], 100);
  EXPECT_EQ((*result)["shot"], 0);
  EXPECT_EQ((*result)["total_score"], 100);

  snap = rig.live.snapshot();
  EXPECT_EQ(snap["state"], "result");
  EXPECT_NEAR(snap["landing_animation"]["duration_s"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(rig.live.animation_duration_s(500.0), 1.0, 1e-12);

  // Input is ignored while the result is on screen.
  rig.as_participant(msg::ButtonDown{});
  for (int i = 0; i < 3999; ++i) rig.live.step();
  EXPECT_EQ(rig.live.snapshot()["state"], "result");
  EXPECT_EQ(rig.live.session()->shot_state().phase, ShotPhase::Approach);
  rig.live.step();
  snap = rig.live.snapshot();
  EXPECT_EQ(snap["state"], "shot");
  EXPECT_TRUE(snap["landing_animation"].is_null());
}

TEST(LiveSession, DisconnectWhileGrabbedAbortsShot) {
  Rig rig;
  rig.start();
  rig.grab();
  ASSERT_EQ(rig.live.session()->shot_state().phase, ShotPhase::Grabbed);
  rig.live.set_participant_connected(false);
  EXPECT_EQ(rig.count<session_io::ev::ShotAborted>(), 1);
  ASSERT_EQ(rig.live.session()->records().size(), 1u);
  EXPECT_TRUE(rig.live.session()->records().front().aborted);
  EXPECT_EQ(rig.live.session()->shot_state().phase, ShotPhase::Approach);

  // Nothing moves while nobody is connected.
  const auto t = rig.live.session()->clock_ms();
  for (int i = 0; i < 10; ++i) rig.live.step();
  EXPECT_EQ(rig.live.session()->clock_ms(), t);
}

TEST(LiveSession, DisconnectBeforeGrabKeepsShot) {
  Rig rig;
  rig.start();
  rig.live.step();
  rig.live.set_participant_connected(false);
  EXPECT_EQ(rig.count<session_io::ev::ShotAborted>(), 0);
  EXPECT_TRUE(rig.live.session()->records().empty());
}

TEST(LiveSession, ReconnectAtPromptRepeatsPrompt) {
  Rig rig;
  rig.as_experimenter(msg::Advance{});
  rig.all_messages();
  rig.live.set_participant_connected(true);
  const auto msgs = rig.all_messages();
  ASSERT_EQ(msgs.size(), 1u);
  EXPECT_EQ(msgs.front()["type"], "prompt");
}

TEST(LiveSession, AssignConditionBeforeStartOnly) {
  Rig rig;
  EXPECT_FALSE(rig.as_experimenter(msg::AssignCondition{GroupCondition::AntisymGaussian}));
  EXPECT_EQ(rig.live.manifest().condition, GroupCondition::AntisymGaussian);
  EXPECT_EQ(rig.live.snapshot()["condition"], "AGS");
  EXPECT_EQ(rig.as_participant(msg::AssignCondition{GroupCondition::Linear}), "experimenter role required");
  rig.as_experimenter(msg::Advance{});
  EXPECT_EQ(rig.as_experimenter(msg::AssignCondition{GroupCondition::Linear}),
            "condition can only be assigned before the session starts");
  EXPECT_EQ(rig.live.session()->manifest().condition, GroupCondition::AntisymGaussian);
}

TEST(LiveSession, PauseFreezesTheClock) {
  Rig rig;
  rig.start();
  rig.live.step();
  EXPECT_FALSE(rig.as_experimenter(msg::Pause{}));
  EXPECT_TRUE(rig.live.snapshot()["paused"].get<bool>());
  EXPECT_EQ(rig.as_participant(msg::ButtonDown{}), "session paused");
  const auto t = rig.live.session()->clock_ms();
  for (int i = 0; i < 20; ++i) rig.live.step();
  EXPECT_EQ(rig.live.session()->clock_ms(), t);
  EXPECT_FALSE(rig.as_experimenter(msg::Resume{}));
  rig.live.step();
  EXPECT_EQ(rig.live.session()->clock_ms(), t + rig.live.manifest().device.step_ms);
}

TEST(Wire, ParsesClientMessages) {
  EXPECT_TRUE(std::holds_alternative<msg::Move>(parse_client_message(R"({"v":1,"type":"move","x":-12.5})")));
  EXPECT_EQ(std::get<msg::Move>(parse_client_message(R"({"v":1,"type":"move","x":-12.5})")).x_mm, -12.5);
  EXPECT_TRUE(std::holds_alternative<msg::ButtonDown>(parse_client_message(R"({"v":1,"type":"button_down"})")));
  EXPECT_TRUE(std::holds_alternative<msg::ButtonUp>(parse_client_message(R"({"v":1,"type":"button_up"})")));
  EXPECT_TRUE(
      std::holds_alternative<msg::Advance>(parse_client_message(R"({"v":1,"type":"command","command":"advance"})")));
  const auto a = parse_client_message(R"({"v":1,"type":"command","command":"assign_condition","condition":"GS"})");
  EXPECT_EQ(std::get<msg::AssignCondition>(a).condition, GroupCondition::Gaussian);

  for (const char* bad : {"", "[1]", R"({"type":"move","x":1})", R"({"v":2,"type":"move","x":1})",
                          R"({"v":1,"type":"move"})", R"({"v":1,"type":"move","x":"a"})", R"({"v":1,"type":"jump"})",
                          R"({"v":1,"type":"command","command":"reboot"})",
                          R"({"v":1,"type":"command","command":"assign_condition","condition":"QQ"})"}) {
    EXPECT_THROW(parse_client_message(bad), Error) << bad;
  }
}

TEST(Wire, PromptMessages) {
  const auto foot = prompt_message(FootPrompt{1, 3});
  EXPECT_EQ(foot["kind"], "foot");
  EXPECT_EQ(foot["to"], 3);
  EXPECT_EQ(foot["v"], 1);
  const auto phase = prompt_message(PhasePrompt{PromptKind::Break, PhaseKind::Training, true});
  EXPECT_EQ(phase["kind"], "phase");
  EXPECT_TRUE(phase["mandatory"].get<bool>());
  EXPECT_EQ(error_message("nope")["reason"], "nope");
}
