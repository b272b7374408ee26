# Models Package - Network Plans and Experiment Records
