#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <thread>

#include "vsched/explorer.hpp"
#include "vsched/frontend.hpp"
#include "vsched/transport.hpp"

using namespace vsched;
using nlohmann::json;

namespace {

std::string design(const std::string& name) { return read_file(std::string(VSCHED_DESIGNS) + "/" + name); }

// Picks the i-th offered choice id (modulo the count).
std::string nth_choice(const Snapshot& s, size_t i) { return s.choices[i % s.choices.size()].id; }

}  // namespace

TEST(Snapshot, JsonRoundTripIsExact) {
  for (const char* f : {"circuit_tb.sv", "nbinterleave2.sv", "continterleave.sv", "coercion_in.sv", "wired.sv"})
    for (Mode m : {Mode::Repaired, Mode::Permissive}) {
      Session s;
      Snapshot snap = s.load(design(f), "", m, f);
      std::mt19937 rng(9);
      for (int k = 0; k < 200 && snap.status == "running"; ++k) {
        json j = snap;
        Snapshot back = j.get<Snapshot>();
        EXPECT_EQ(back, snap);
        EXPECT_EQ(json(back).dump(), j.dump());
        snap = s.step(nth_choice(snap, rng()));
      }
      json j = snap;
      EXPECT_EQ(j.get<Snapshot>(), snap);
    }
}

TEST(Snapshot, ShapeOfTheFirstState) {
  Session s;
  Snapshot snap = s.load(design("continterleave.sv"), "", Mode::Repaired, "ci.sv");
  EXPECT_EQ(snap.protocol, "vv/1");
  EXPECT_EQ(snap.rev, 1u);
  EXPECT_EQ(snap.status, "running");
  EXPECT_EQ(snap.mode, "repaired");
  ASSERT_EQ(snap.objects.size(), 3u);
  EXPECT_EQ(snap.objects[0].name, "i");
  EXPECT_EQ(snap.objects[0].value, "x");
  ASSERT_EQ(snap.drivers.size(), 2u);
  EXPECT_EQ(snap.drivers[1].expr, "(i + 1)");
  ASSERT_EQ(snap.queue.size(), 1u);
  ASSERT_EQ(snap.queue[0].active.size(), 1u);
  EXPECT_EQ(snap.queue[0].active[0].choice, "1:a0");
  ASSERT_EQ(snap.choices.size(), 1u);
  EXPECT_EQ(snap.choices[0].id, "1:a0");
  EXPECT_FALSE(snap.monitor.has_value());
  EXPECT_NE(snap.source.find("module continterleave"), std::string::npos);
}

TEST(Snapshot, WarningsAreFormattedWithTheFileName) {
  Session s;
  Snapshot snap = s.load(design("coercion_in.sv"), "", Mode::Repaired, "c.sv");
  ASSERT_EQ(snap.warnings.size(), 1u);
  EXPECT_EQ(snap.warnings[0], "c.sv:2:25: warning: port 'i' coerced to inout");
}

TEST(Session, StepsMatchTheKernel) {
  // Property: every session step equals applying the same choice directly.
  for (const char* f : {"circuit_tb.sv", "cp/interleave3.sv", "nbinterleave2.sv", "net_delay.sv"})
    for (Mode m : {Mode::Repaired, Mode::Permissive})
      for (uint32_t seed = 0; seed < 5; ++seed) {
        Session s;
        Snapshot snap = s.load(design(f), "", m);
        SimState ref = initialize(compile(design(f), semantics_for(m)));
        std::mt19937 rng(seed);
        while (snap.status == "running") {
          auto cs = enabled_choices(ref);
          ASSERT_EQ(cs.size(), snap.choices.size());
          size_t i = rng() % cs.size();
          EXPECT_EQ(snap.choices[i].id, choice_id(snap.rev, cs[i]));
          apply(ref, cs[i]);
          finish_if_quiescent(ref);
          snap = s.step(snap.choices[i].id);
          EXPECT_EQ(snap.time, ref.time);
          EXPECT_EQ(snap.output, ref.output);
          EXPECT_EQ(snap, make_snapshot(ref, snap.rev));
        }
      }
}

TEST(Session, RevisionsAndErrors) {
  Session s;
  EXPECT_THROW(s.snapshot(), SessionError);
  Snapshot a = s.load(design("two_initials.sv"));
  Snapshot b = s.step(a.choices[0].id);
  EXPECT_EQ(b.rev, a.rev + 1);
  try {
    s.step(a.choices[1].id);
    FAIL();
  } catch (const SessionError& e) {
    EXPECT_EQ(e.code(), "stale-choice");
  }
  try {
    s.step(std::to_string(b.rev) + ":a9");
    FAIL();
  } catch (const SessionError& e) {
    EXPECT_EQ(e.code(), "unknown-choice");
  }
  Snapshot c = s.step(b.choices[0].id);
  EXPECT_EQ(c.status, "finished");
  EXPECT_EQ(c.reason, "event queue exhausted");
  EXPECT_TRUE(c.choices.empty());
  try {
    s.step(std::to_string(c.rev) + ":a0");
    FAIL();
  } catch (const SessionError& e) {
    EXPECT_EQ(e.code(), "finished");
  }
  Snapshot r = s.reset();
  EXPECT_EQ(r.status, "running");
  EXPECT_GT(r.rev, c.rev);
  EXPECT_EQ(r.choices.size(), 2u);
}

TEST(Session, FailedLoadKeepsThePreviousDesign) {
  Session s;
  Snapshot a = s.load(design("single_process.sv"));
  try {
    s.load("module broken; initial a = ; endmodule", "", Mode::Repaired, "b.sv");
    FAIL();
  } catch (const SessionError& e) {
    EXPECT_EQ(e.code(), "load");
    ASSERT_EQ(e.diagnostics().size(), 1u);
    EXPECT_EQ(e.diagnostics()[0].rfind("b.sv:1:", 0), 0u) << e.diagnostics()[0];
  }
  Snapshot b = s.snapshot();
  EXPECT_EQ(a, b);
  EXPECT_NO_THROW(s.step(b.choices[0].id));
}

TEST(Session, MonitorChoiceIsOffered) {
  Session s;
  Snapshot snap = s.load(design("circuit_tb.sv"));
  while (!snap.monitor) snap = s.step(snap.choices[0].id);
  while (snap.monitor->choice.empty()) snap = s.step(snap.choices[0].id);
  EXPECT_EQ(snap.monitor->choice, std::to_string(snap.rev) + ":monitor");
  snap = s.step(snap.monitor->choice);
  EXPECT_EQ(snap.output, std::vector<std::string>{"time = 0 --> inp1 = x, inp2 = x, out = x"});
  EXPECT_EQ(snap.time_choice, std::to_string(snap.rev) + ":time");
}

TEST(Envelope, RequestsAndErrors) {
  Session s;
  json r = s.handle({{"id", 1}, {"cmd", "snapshot"}});
  EXPECT_EQ(r["id"], 1);
  EXPECT_EQ(r["err"]["code"], "not-loaded");

  r = s.handle({{"id", "x"}, {"cmd", "load"}, {"source", design("nbinterleave1.sv")}, {"mode", "permissive"}});
  ASSERT_TRUE(r.contains("ok")) << r.dump();
  EXPECT_EQ(r["id"], "x");
  EXPECT_EQ(r["ok"]["mode"], "permissive");

  EXPECT_EQ(s.handle({{"cmd", "load"}})["err"]["code"], "bad-request");
  EXPECT_EQ(s.handle({{"cmd", "load"}, {"source", "module m; endmodule"}, {"mode", "odd"}})["err"]["code"],
            "bad-request");
  EXPECT_EQ(s.handle({{"cmd", "jump"}})["err"]["code"], "bad-request");
  EXPECT_EQ(s.handle({{"cmd", "step"}})["err"]["code"], "bad-request");
  EXPECT_EQ(s.handle(json::array())["err"]["code"], "bad-request");
  EXPECT_EQ(json::parse(s.handle_line("{nope"))["err"]["code"], "bad-json");

  json bad = s.handle({{"id", 7}, {"cmd", "load"}, {"source", "module m; nosuch u(); endmodule"}});
  EXPECT_EQ(bad["err"]["code"], "load");
  EXPECT_EQ(bad["err"]["diagnostics"].size(), 1u);

  // session still holds the permissive design
  json snap = s.handle({{"cmd", "snapshot"}});
  EXPECT_EQ(snap["ok"]["mode"], "permissive");
  EXPECT_TRUE(snap["id"].is_null());
}

TEST(Envelope, WholeRunThroughJson) {
  Session s;
  json r = s.handle({{"cmd", "load"}, {"source", design("single_process.sv")}});
  while (r["ok"]["status"] == "running") r = s.handle({{"cmd", "step"}, {"choice", r["ok"]["choices"][0]["id"]}});
  EXPECT_EQ(r["ok"]["output"], json({"r = 01", "r = 10 at 2"}));
}

TEST(Stream, NdjsonOverStreams) {
  std::istringstream in(json({{"id", 1}, {"cmd", "load"}, {"source", design("var_init.sv")}}).dump() +
                        "\n\n   \r\n" + json({{"id", 2}, {"cmd", "step"}, {"choice", "1:a0"}}).dump() + "\r\n" +
                        "garbage\n");
  std::ostringstream out;
  serve_stream(in, out);
  std::istringstream lines(out.str());
  std::vector<json> replies;
  for (std::string l; std::getline(lines, l);) replies.push_back(json::parse(l));
  ASSERT_EQ(replies.size(), 3u);
  EXPECT_EQ(replies[0]["id"], 1);
  EXPECT_EQ(replies[1]["ok"]["output"], json({"1"}));
  EXPECT_EQ(replies[2]["err"]["code"], "bad-json");
}

TEST(WebSocket, AcceptKeyMatchesRfcExample) {
  EXPECT_EQ(ws::accept_key("dGhlIHNhbXBsZSBub25jZQ=="), "s3pPLMBiTxaQ9kYGzzhZRbK+xOo=");
}

TEST(WebSocket, FrameEncodingLengths) {
  // 7-bit, 16-bit and 64-bit length forms
  EXPECT_EQ(ws::encode_frame(ws::Text, std::string(5, 'a')).size(), 2u + 5);
  EXPECT_EQ(ws::encode_frame(ws::Text, std::string(300, 'a')).size(), 4u + 300);
  EXPECT_EQ(ws::encode_frame(ws::Text, std::string(70000, 'a')).size(), 10u + 70000);
  std::string f = ws::encode_frame(ws::Text, "hi");
  EXPECT_EQ(static_cast<uint8_t>(f[0]), 0x81);
  EXPECT_EQ(static_cast<uint8_t>(f[1]), 2);
  const uint8_t mask[4] = {1, 2, 3, 4};
  std::string m = ws::encode_frame(ws::Text, "hi", mask);
  EXPECT_EQ(static_cast<uint8_t>(m[1]), 0x80 | 2);
  EXPECT_EQ(m[6], static_cast<char>('h' ^ 1));
}

class WsServer : public ::testing::Test {
 protected:
  void SetUp() override {
    server_ = std::make_unique<ws::Server>(0);
    thread_ = std::thread([this] { server_->serve(); });
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }
  std::unique_ptr<ws::Server> server_;
  std::thread thread_;
};

TEST_F(WsServer, HandshakeAndSession) {
  {
    ws::Client c(server_->port());
    EXPECT_NE(c.handshake().find("101 Switching Protocols"), std::string::npos);
    EXPECT_NE(c.handshake().find("Sec-WebSocket-Accept: s3pPLMBiTxaQ9kYGzzhZRbK+xOo="), std::string::npos);
    json r = json::parse(c.request(json({{"id", 1}, {"cmd", "load"}, {"source", design("var_init.sv")}}).dump()));
    ASSERT_TRUE(r.contains("ok")) << r.dump();
    r = json::parse(c.request(json({{"id", 2}, {"cmd", "step"}, {"choice", r["ok"]["choices"][0]["id"]}}).dump()));
    EXPECT_EQ(r["ok"]["output"], json({"1"}));
    EXPECT_EQ(r["ok"]["status"], "finished");

    // ping gets the payload back
    ASSERT_TRUE(c.send(ws::Ping, "p"));
    ws::Frame f;
    ASSERT_TRUE(c.receive(f));
    EXPECT_EQ(f.opcode, ws::Pong);
    EXPECT_EQ(f.payload, "p");

    // fragmented message with two requests
    const uint8_t mask[4] = {9, 8, 7, 6};
    std::string first = ws::encode_frame(ws::Text, "{\"id\":3,\"cmd\":\"snap", mask);
    first[0] = static_cast<char>(first[0] & 0x7F);  // clear FIN
    ASSERT_TRUE(c.send_raw(first));
    ASSERT_TRUE(c.send(ws::Continuation, "shot\"}\n{\"id\":4,\"cmd\":\"reset\"}"));
    ASSERT_TRUE(c.receive(f));
    EXPECT_EQ(json::parse(f.payload)["id"], 3);
    ASSERT_TRUE(c.receive(f));
    EXPECT_EQ(json::parse(f.payload)["id"], 4);
    EXPECT_EQ(json::parse(f.payload)["ok"]["status"], "running");

    ASSERT_TRUE(c.send(ws::Close, std::string("\x03\xe8", 2)));
    ASSERT_TRUE(c.receive(f));
    EXPECT_EQ(f.opcode, ws::Close);
  }
}

TEST_F(WsServer, ConnectionsHaveSeparateSessions) {
  ws::Client a(server_->port()), b(server_->port());
  a.request(json({{"cmd", "load"}, {"source", design("var_init.sv")}}).dump());
  EXPECT_EQ(json::parse(b.request(R"({"cmd":"snapshot"})"))["err"]["code"], "not-loaded");
}

TEST_F(WsServer, ProtocolViolationsClose) {
  {
    ws::Client c(server_->port());
    ASSERT_TRUE(c.send(ws::Binary, "x"));
    ws::Frame f;
    ASSERT_TRUE(c.receive(f));
    EXPECT_EQ(f.opcode, ws::Close);
    EXPECT_EQ(f.payload, ws::close_payload(1003));
  }
  {
    ws::Client c(server_->port());
    ASSERT_TRUE(c.send_raw(ws::encode_frame(ws::Text, "{}")));  // unmasked
    ws::Frame f;
    ASSERT_TRUE(c.receive(f));
    EXPECT_EQ(f.opcode, ws::Close);
    EXPECT_EQ(f.payload, ws::close_payload(1002));
  }
}

TEST_F(WsServer, PlainHttpIsRejected) {
  ws::Client c(server_->port(), "");
  EXPECT_NE(c.handshake().find("400 Bad Request"), std::string::npos);
}
