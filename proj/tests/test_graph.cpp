int dummy_test_graph;
