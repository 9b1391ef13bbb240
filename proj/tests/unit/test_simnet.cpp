#include "swarm/simnet.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace swarm;
using namespace swarm::simnet;

TEST(Network, StarBroadcast) {
  Network net(WeightedGraph::star(4));
  net.broadcast_to_neighbors(0, ScaleEstimate{1.0});
  net.broadcast_to_neighbors(2, ScaleEstimate{2.0});
  net.seal_all();
  net.advance_round();
  for (int leaf = 1; leaf < 4; ++leaf) {
    ASSERT_EQ(net.inbox(leaf).size(), 1u);
    EXPECT_EQ(net.inbox(leaf)[0].src, 0);
  }
  ASSERT_EQ(net.inbox(0).size(), 1u);
  EXPECT_EQ(net.inbox(0)[0].src, 2);
}

TEST(Network, IsolatedAgentDeliversNothing) {
  Network net(WeightedGraph::empty(3));
  net.broadcast_to_neighbors(1, ScaleEstimate{1.0});
  net.seal_all();
  net.advance_round();
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(net.inbox(i).empty());
  EXPECT_EQ(net.messages_delivered(), 0u);
}

TEST(Network, LocalityAndSealing) {
  Network net(WeightedGraph::path(3));
  EXPECT_THROW(net.send(0, 2, ScaleEstimate{}), InvalidArgument);
  net.seal(0);
  EXPECT_THROW(net.send(0, 1, ScaleEstimate{}), InvalidArgument);
  net.seal(1);
  EXPECT_THROW(net.advance_round(), InvalidArgument);
}

TEST(Network, EmptyRound) {
  Network net(WeightedGraph::ring(4));
  net.seal_all();
  EXPECT_EQ(net.advance_round(), 1);
  for (int i = 0; i < 4; ++i) EXPECT_TRUE(net.inbox(i).empty());
}

TEST(Network, InboxOrderedBySource) {
  Network net(WeightedGraph::star(4));
  net.send(3, 0, ScaleEstimate{3});
  net.send(1, 0, ScaleEstimate{1});
  net.send(2, 0, ScaleEstimate{2});
  net.seal_all();
  net.advance_round();
  ASSERT_EQ(net.inbox(0).size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(net.inbox(0)[k].src, k + 1);
}

TEST(Network, ReplayHasIdenticalTranscript) {
  auto run = [] {
    Network net(WeightedGraph::ring(5));
    for (int r = 0; r < 3; ++r) {
      for (int i = 0; i < 5; ++i) net.broadcast_to_neighbors(i, StateEstimate{Vec3(i, r, 0), Vec3::Zero()});
      net.seal_all();
      net.advance_round();
    }
    std::ostringstream os;
    net.write_transcript(os);
    return std::make_pair(net.transcript_hash(), os.str());
  };
  const auto a = run(), b = run();
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_FALSE(a.second.empty());
}

TEST(Network, EdgeDelay) {
  Network net(WeightedGraph::path(2));
  net.set_edge_delay(0, 1, 1);
  net.send(0, 1, ScaleEstimate{5});
  net.seal_all();
  net.advance_round();
  EXPECT_TRUE(net.inbox(1).empty());
  net.seal_all();
  net.advance_round();
  EXPECT_EQ(net.inbox(1).size(), 1u);
}

TEST(VersionStore, RelayAlongPathInTwoRounds) {
  // Agents 0 - 1 - 2; the block of agent 0 reaches agent 2 through agent 1.
  Network net(WeightedGraph::path(3));
  std::vector<VersionStore> store(3, VersionStore(3));
  TrajectoryBlock own{0, 0, 1, Vector::Ones(6)};
  store[0].offer(own);
  int arrival = -1;
  for (int round = 1; round <= 3 && arrival < 0; ++round) {
    for (int i = 0; i < 3; ++i)
      for (int origin = 0; origin < 3; ++origin)
        if (store[i].has(origin)) {
          TrajectoryBlock b = store[i].get(origin);
          b.holder = i;
          net.broadcast_to_neighbors(i, b);
        }
    net.seal_all();
    net.advance_round();
    for (int i = 0; i < 3; ++i)
      for (const auto& m : net.inbox(i)) store[i].offer(std::get<TrajectoryBlock>(m.payload));
    if (store[2].has(0)) arrival = round;
  }
  EXPECT_EQ(arrival, 2);
  EXPECT_EQ(store[2].version(0), 1u);
  EXPECT_FALSE(store[1].offer(own));  // same version is not newer
}
